//! Strict parsing of spec documents, family descriptors, vectors, and set
//! lists from JSON text.
//!
//! Parsing is deliberately two-phase. Serde's internally tagged enums cannot
//! reject unknown fields on their own, so a manual allowlist walk over the
//! raw JSON value runs first and rejects anything outside the documented
//! schema; only then does the typed deserialization run, followed by the
//! semantic validation provided by the computation crate (coefficient
//! ranges, hereditary closure, and so on).
//!
//! Schema of a spec document (rationals are always `"p/q"` strings, never
//! floats):
//!
//! ```json
//! {
//!   "schemaVersion": 1,
//!   "name": "optional label",
//!   "space": { "form": "FiniteMixed", "entries": [
//!       { "family": { "kind": "AnK", "k": 2 }, "theta": "1/2" } ] },
//!   "options": { "precision": 64, "indexCap": 24, "budget": 10000000 }
//! }
//! ```
//!
//! `space.form` is `"FiniteMixed"` (field `entries`) or `"AdmissibleSeq"`
//! (field `coeffs`). Family kinds: `AnK {k}`, `Schreier`, `Singletons`,
//! `ExplicitFinite {members}`, `PairTailPow2`, `PairConsecutive`,
//! `UnionOf {parts}`. Coefficient forms: `ExplicitList {values, tail?}`,
//! `Constant {c}`, `InvLinear`, `PowerLaw {gamma, alpha}`, `InvLogPow {r}`.

use anyhow::{anyhow, bail, Context, Result};
use serde_json::{Map, Value as Json};
use tsirelson::{parse_rational, Family, FinSet, FinVec, SpaceSpec};

/// Options block of a spec document. Command-line flags take precedence
/// over these, which in turn take precedence over built-in defaults.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct DocOptions {
    pub precision: Option<u32>,
    pub index_cap: Option<u32>,
    pub budget: Option<u64>,
}

/// A fully validated spec document.
#[derive(Debug, Clone)]
pub struct SpecDocument {
    pub name: Option<String>,
    pub space: SpaceSpec,
    pub options: DocOptions,
    /// Normalization notes from validation (e.g. hereditary closure applied
    /// to an explicit family). Not errors; surfaced on stderr.
    pub warnings: Vec<String>,
}

/// The one schema revision this build reads and writes.
pub const SCHEMA_VERSION: u64 = 1;

fn as_object<'a>(v: &'a Json, what: &str) -> Result<&'a Map<String, Json>> {
    v.as_object().ok_or_else(|| anyhow!("{what} must be a JSON object"))
}

fn check_keys(map: &Map<String, Json>, what: &str, allowed: &[&str]) -> Result<()> {
    for key in map.keys() {
        if !allowed.contains(&key.as_str()) {
            bail!("unknown field {key:?} in {what} (allowed: {})", allowed.join(", "));
        }
    }
    Ok(())
}

fn as_u64(v: &Json, what: &str) -> Result<u64> {
    v.as_u64().ok_or_else(|| anyhow!("{what} must be an unsigned integer"))
}

fn as_u32(v: &Json, what: &str) -> Result<u32> {
    u32::try_from(as_u64(v, what)?).with_context(|| format!("{what} does not fit in 32 bits"))
}

fn as_str<'a>(v: &'a Json, what: &str) -> Result<&'a str> {
    v.as_str().ok_or_else(|| anyhow!("{what} must be a string"))
}

fn require<'a>(map: &'a Map<String, Json>, what: &str, key: &str) -> Result<&'a Json> {
    map.get(key).ok_or_else(|| anyhow!("{what} is missing the required field {key:?}"))
}

fn check_rational_field(map: &Map<String, Json>, what: &str, key: &str) -> Result<()> {
    let raw = as_str(require(map, what, key)?, &format!("{what}.{key}"))?;
    parse_rational(raw).with_context(|| format!("{what}.{key} is not a valid rational"))?;
    Ok(())
}

/// Allowlist walk over a family descriptor.
fn walk_family(v: &Json, what: &str) -> Result<()> {
    let map = as_object(v, what)?;
    let kind = as_str(require(map, what, "kind")?, &format!("{what}.kind"))?;
    match kind {
        "AnK" => {
            check_keys(map, what, &["kind", "k"])?;
            as_u32(require(map, what, "k")?, &format!("{what}.k"))?;
        }
        "Schreier" | "Singletons" | "PairTailPow2" | "PairConsecutive" => {
            check_keys(map, what, &["kind"])?;
        }
        "ExplicitFinite" => {
            check_keys(map, what, &["kind", "members"])?;
            let members = require(map, what, "members")?
                .as_array()
                .ok_or_else(|| anyhow!("{what}.members must be an array of integer arrays"))?;
            for (i, m) in members.iter().enumerate() {
                let elems = m.as_array().ok_or_else(|| {
                    anyhow!("{what}.members[{i}] must be an array of positive integers")
                })?;
                for e in elems {
                    as_u32(e, &format!("{what}.members[{i}] element"))?;
                }
            }
        }
        "UnionOf" => {
            check_keys(map, what, &["kind", "parts"])?;
            let parts = require(map, what, "parts")?
                .as_array()
                .ok_or_else(|| anyhow!("{what}.parts must be an array of families"))?;
            for (i, p) in parts.iter().enumerate() {
                walk_family(p, &format!("{what}.parts[{i}]"))?;
            }
        }
        other => bail!(
            "unknown family kind {other:?} in {what} (known: AnK, Schreier, Singletons, \
             ExplicitFinite, PairTailPow2, PairConsecutive, UnionOf)"
        ),
    }
    Ok(())
}

/// Allowlist walk over a coefficient-sequence descriptor.
fn walk_coeffs(v: &Json, what: &str) -> Result<()> {
    let map = as_object(v, what)?;
    let form = as_str(require(map, what, "form")?, &format!("{what}.form"))?;
    match form {
        "ExplicitList" => {
            check_keys(map, what, &["form", "values", "tail"])?;
            let values = require(map, what, "values")?
                .as_array()
                .ok_or_else(|| anyhow!("{what}.values must be an array of rational strings"))?;
            for (i, value) in values.iter().enumerate() {
                let raw = as_str(value, &format!("{what}.values[{i}]"))?;
                parse_rational(raw)
                    .with_context(|| format!("{what}.values[{i}] is not a valid rational"))?;
            }
            if map.contains_key("tail") {
                check_rational_field(map, what, "tail")?;
            }
        }
        "Constant" => {
            check_keys(map, what, &["form", "c"])?;
            check_rational_field(map, what, "c")?;
        }
        "InvLinear" => check_keys(map, what, &["form"])?,
        "PowerLaw" => {
            check_keys(map, what, &["form", "gamma", "alpha"])?;
            check_rational_field(map, what, "gamma")?;
            check_rational_field(map, what, "alpha")?;
        }
        "InvLogPow" => {
            check_keys(map, what, &["form", "r"])?;
            check_rational_field(map, what, "r")?;
        }
        other => bail!(
            "unknown coefficient form {other:?} in {what} (known: ExplicitList, Constant, \
             InvLinear, PowerLaw, InvLogPow)"
        ),
    }
    Ok(())
}

/// Allowlist walk over a space descriptor.
fn walk_space(v: &Json, what: &str) -> Result<()> {
    let map = as_object(v, what)?;
    let form = as_str(require(map, what, "form")?, &format!("{what}.form"))?;
    match form {
        "FiniteMixed" => {
            check_keys(map, what, &["form", "entries"])?;
            let entries = require(map, what, "entries")?
                .as_array()
                .ok_or_else(|| anyhow!("{what}.entries must be an array"))?;
            for (i, entry) in entries.iter().enumerate() {
                let ewhat = format!("{what}.entries[{i}]");
                let emap = as_object(entry, &ewhat)?;
                check_keys(emap, &ewhat, &["family", "theta"])?;
                walk_family(require(emap, &ewhat, "family")?, &format!("{ewhat}.family"))?;
                check_rational_field(emap, &ewhat, "theta")?;
            }
        }
        "AdmissibleSeq" => {
            check_keys(map, what, &["form", "coeffs"])?;
            walk_coeffs(require(map, what, "coeffs")?, &format!("{what}.coeffs"))?;
        }
        other => bail!("unknown space form {other:?} in {what} (known: FiniteMixed, AdmissibleSeq)"),
    }
    Ok(())
}

/// Parse and validate a complete spec document.
pub fn parse_spec_document(text: &str) -> Result<SpecDocument> {
    let root: Json = serde_json::from_str(text).context("spec document is not valid JSON")?;
    let map = as_object(&root, "spec document")?;
    check_keys(map, "spec document", &["schemaVersion", "name", "space", "options"])?;
    if let Some(v) = map.get("schemaVersion") {
        let version = as_u64(v, "schemaVersion")?;
        if version != SCHEMA_VERSION {
            bail!("unsupported schemaVersion {version} (this build reads version {SCHEMA_VERSION})");
        }
    }
    let name = match map.get("name") {
        Some(v) => Some(as_str(v, "name")?.to_string()),
        None => None,
    };
    let mut options = DocOptions::default();
    if let Some(v) = map.get("options") {
        let omap = as_object(v, "options")?;
        check_keys(omap, "options", &["precision", "indexCap", "budget"])?;
        if let Some(p) = omap.get("precision") {
            options.precision = Some(as_u32(p, "options.precision")?);
        }
        if let Some(c) = omap.get("indexCap") {
            options.index_cap = Some(as_u32(c, "options.indexCap")?);
        }
        if let Some(b) = omap.get("budget") {
            options.budget = Some(as_u64(b, "options.budget")?);
        }
    }
    let space_json = require(map, "spec document", "space")?;
    walk_space(space_json, "space")?;
    let mut space: SpaceSpec =
        serde_json::from_value(space_json.clone()).context("space descriptor failed to parse")?;
    let warnings = space.validate().map_err(|e| anyhow!("invalid space: {e}"))?;
    Ok(SpecDocument { name, space, options, warnings })
}

/// Parse and validate a standalone family descriptor.
pub fn parse_family_text(text: &str) -> Result<(Family, Vec<String>)> {
    let root: Json = serde_json::from_str(text).context("family descriptor is not valid JSON")?;
    walk_family(&root, "family")?;
    let mut family: Family =
        serde_json::from_value(root).context("family descriptor failed to parse")?;
    let warnings = family.validate().map_err(|e| anyhow!("invalid family: {e}"))?;
    Ok((family, warnings))
}

/// Parse a vector: either a `{"position": "p/q"}` map or the all-ones
/// shorthand `segment a..b` (a JSON string containing the shorthand is also
/// accepted).
pub fn parse_vector_text(text: &str) -> Result<FinVec> {
    let trimmed = text.trim();
    if trimmed.starts_with('{') {
        let root: Json = serde_json::from_str(trimmed).context("vector map is not valid JSON")?;
        let map = as_object(&root, "vector")?;
        let mut entries = Vec::with_capacity(map.len());
        for (key, value) in map {
            let pos: u32 = key
                .parse()
                .with_context(|| format!("vector key {key:?} is not a positive integer"))?;
            let raw = as_str(value, &format!("vector[{key}]"))?;
            let coeff = parse_rational(raw)
                .with_context(|| format!("vector[{key}] is not a valid rational"))?;
            entries.push((pos, coeff));
        }
        return FinVec::from_entries(entries).map_err(|e| anyhow!("invalid vector: {e}"));
    }
    if trimmed.starts_with('"') {
        let inner: String =
            serde_json::from_str(trimmed).context("vector string is not valid JSON")?;
        return parse_segment_shorthand(&inner);
    }
    parse_segment_shorthand(trimmed)
}

fn parse_segment_shorthand(text: &str) -> Result<FinVec> {
    let rest = text
        .trim()
        .strip_prefix("segment")
        .ok_or_else(|| {
            anyhow!(
                "vector must be a {{\"position\": \"p/q\"}} map or the shorthand \
                 \"segment a..b\", got {text:?}"
            )
        })?
        .trim();
    let (a, b) = rest
        .split_once("..")
        .ok_or_else(|| anyhow!("segment shorthand needs the form \"segment a..b\", got {text:?}"))?;
    let a: u32 = a.trim().parse().with_context(|| format!("bad segment start {a:?}"))?;
    let b: u32 = b.trim().parse().with_context(|| format!("bad segment end {b:?}"))?;
    FinVec::segment_ones(a, b).map_err(|e| anyhow!("invalid segment: {e}"))
}

/// Parse a list of finite sets given as a JSON array of integer arrays.
pub fn parse_sets_text(text: &str) -> Result<Vec<FinSet>> {
    let root: Json = serde_json::from_str(text).context("set list is not valid JSON")?;
    let arr = root
        .as_array()
        .ok_or_else(|| anyhow!("set list must be a JSON array of integer arrays"))?;
    let mut sets = Vec::with_capacity(arr.len());
    for (i, s) in arr.iter().enumerate() {
        let elems = s
            .as_array()
            .ok_or_else(|| anyhow!("set list entry {i} must be an array of positive integers"))?;
        let mut v = Vec::with_capacity(elems.len());
        for e in elems {
            v.push(as_u32(e, &format!("set list entry {i} element"))?);
        }
        sets.push(FinSet::new(v).map_err(|e| anyhow!("set list entry {i}: {e}"))?);
    }
    Ok(sets)
}
