//! File formats: JSON mirrors for instances, TIDs and graphs, the TID text
//! extension, and DOT dumps.

use std::collections::BTreeMap;
use std::path::Path;

use anyhow::{anyhow, bail, Context, Result};
use serde::{Deserialize, Serialize};

use urlab_core::hardprob::{BipartiteGraph, StGraph};
use urlab_core::instance::{Fact, Instance};
use urlab_core::reliability::{Probability, Tid};

/// JSON mirror of an instance: `{"facts":[["S","a","b"],...]}` with facts
/// in canonical order, so serialization is byte-stable.
#[derive(Debug, Serialize, Deserialize)]
pub struct InstanceJson {
    pub facts: Vec<[String; 3]>,
}

impl From<&Instance> for InstanceJson {
    fn from(inst: &Instance) -> InstanceJson {
        InstanceJson {
            facts: inst
                .facts()
                .map(|f| {
                    [
                        f.rel.as_str().to_string(),
                        f.subject.as_str().to_string(),
                        f.object.as_str().to_string(),
                    ]
                })
                .collect(),
        }
    }
}

impl InstanceJson {
    pub fn into_instance(self) -> Instance {
        Instance::new(self.facts.into_iter().map(|[r, a, b]| Fact::new(r, a, b)))
    }
}

pub fn instance_to_json(inst: &Instance) -> String {
    serde_json::to_string(&InstanceJson::from(inst)).expect("instance serializes")
}

/// Loads an instance from a path: `.json` files use the JSON mirror, others
/// the fact-list text format.
pub fn load_instance(path: &Path) -> Result<Instance> {
    let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    if path.extension().is_some_and(|e| e == "json") {
        let parsed: InstanceJson =
            serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()))?;
        Ok(parsed.into_instance())
    } else {
        Instance::parse(&text).map_err(|e| anyhow!("{}: {e}", path.display()))
    }
}

/// TID text format: the instance format with an optional ` : prob` suffix
/// per line; facts without a suffix take the default probability.
pub fn parse_tid_text(text: &str, default: &Probability) -> Result<Tid> {
    let mut facts: BTreeMap<Fact, Probability> = BTreeMap::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() {
            continue;
        }
        let (fact_part, prob) = match line.split_once(" : ") {
            Some((f, p)) => (f.trim(), Probability::parse(p).map_err(|e| anyhow!("line {}: {e}", idx + 1))?),
            None => (line, default.clone()),
        };
        let inst = Instance::parse(fact_part).map_err(|e| anyhow!("line {}: {e}", idx + 1))?;
        let fact = inst
            .facts()
            .next()
            .ok_or_else(|| anyhow!("line {}: expected a fact", idx + 1))?
            .clone();
        facts.insert(fact, prob);
    }
    let instance = Instance::new(facts.keys().cloned());
    Ok(Tid::new(instance, facts).map_err(|e| anyhow!("{e}"))?)
}

/// JSON mirror of a TID: the instance mirror plus per-fact probabilities.
#[derive(Debug, Serialize, Deserialize)]
pub struct TidJson {
    pub facts: Vec<[String; 3]>,
    pub probs: Vec<[String; 4]>,
}

pub fn load_tid(path: &Path, uniform: Option<&Probability>) -> Result<Tid> {
    let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let default = uniform.cloned().unwrap_or_else(Probability::half);
    if path.extension().is_some_and(|e| e == "json") {
        let parsed: TidJson =
            serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()))?;
        let instance = Instance::new(
            parsed
                .facts
                .iter()
                .map(|[r, a, b]| Fact::new(r.clone(), a.clone(), b.clone())),
        );
        let mut probs: BTreeMap<Fact, Probability> =
            instance.facts().map(|f| (f.clone(), default.clone())).collect();
        for [r, a, b, p] in parsed.probs {
            let f = Fact::new(r, a, b);
            if !instance.contains(&f) {
                bail!("probability given for absent fact {f}");
            }
            probs.insert(f, Probability::parse(&p).map_err(|e| anyhow!("{e}"))?);
        }
        Ok(Tid::new(instance, probs).map_err(|e| anyhow!("{e}"))?)
    } else {
        parse_tid_text(&text, &default)
    }
}

/// Bipartite graph JSON: `{"U":[...],"V":[...],"E":[[u,v],...]}`.
#[derive(Debug, Serialize, Deserialize)]
pub struct BipartiteJson {
    #[serde(rename = "U")]
    pub u: Vec<String>,
    #[serde(rename = "V")]
    pub v: Vec<String>,
    #[serde(rename = "E")]
    pub e: Vec<[String; 2]>,
}

pub fn load_bipartite(path: &Path) -> Result<BipartiteGraph> {
    let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let parsed: BipartiteJson =
        serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()))?;
    BipartiteGraph::new(
        parsed.u,
        parsed.v,
        parsed.e.into_iter().map(|[a, b]| (a, b)).collect(),
    )
    .map_err(|e| anyhow!("{e}"))
}

/// Source-sink graph JSON mirror of the edge-list text format.
#[derive(Debug, Serialize, Deserialize)]
pub struct StGraphJson {
    pub vertices: Vec<String>,
    pub edges: Vec<[String; 2]>,
    pub r: String,
    pub s: String,
}

pub fn load_st_graph(path: &Path) -> Result<StGraph> {
    let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    if path.extension().is_some_and(|e| e == "json") {
        let parsed: StGraphJson =
            serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()))?;
        StGraph::new(
            parsed.vertices,
            parsed.edges.into_iter().map(|[a, b]| (a, b)).collect(),
            &parsed.r,
            &parsed.s,
        )
        .map_err(|e| anyhow!("{e}"))
    } else {
        StGraph::parse(&text).map_err(|e| anyhow!("{}: {e}", path.display()))
    }
}

/// DOT dump of an instance: one labeled arc per fact (unary facts are
/// self-loops).
pub fn instance_to_dot(inst: &Instance) -> String {
    let mut out = String::from("digraph instance {\n");
    for e in inst.dom() {
        out.push_str(&format!("  \"{e}\";\n"));
    }
    for f in inst.facts() {
        out.push_str(&format!(
            "  \"{}\" -> \"{}\" [label=\"{}\"];\n",
            f.subject, f.object, f.rel
        ));
    }
    out.push_str("}\n");
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn instance_json_round_trip_is_byte_stable() {
        let inst = Instance::parse("T(b)\nS(a,b)\nR(a)").unwrap();
        let once = instance_to_json(&inst);
        let parsed: InstanceJson = serde_json::from_str(&once).unwrap();
        let again = instance_to_json(&parsed.into_instance());
        assert_eq!(once, again);
        assert_eq!(once, r#"{"facts":[["R","a","a"],["S","a","b"],["T","b","b"]]}"#);
    }

    #[test]
    fn tid_text_with_probabilities() {
        let tid = parse_tid_text("R(a) : 1/3\nS(a,b)\n", &Probability::half()).unwrap();
        assert_eq!(tid.prob(&Fact::new("R", "a", "a")), &Probability::parse("1/3").unwrap());
        assert_eq!(tid.prob(&Fact::new("S", "a", "b")), &Probability::half());
    }

    #[test]
    fn dot_mentions_every_fact() {
        let inst = Instance::parse("R(a)\nS(a,b)").unwrap();
        let dot = instance_to_dot(&inst);
        assert!(dot.contains("\"a\" -> \"b\" [label=\"S\"]"));
        assert!(dot.contains("\"a\" -> \"a\" [label=\"R\"]"));
    }
}
