//! Canonical JSON serialization for all three model kinds.
//!
//! The document format is `{"kind", "version": "1", "model": ...}`. Network
//! payloads list variables, arcs and CPTs; multinets add hypothesis
//! variables, blocks, block priors and local networks; similarity networks
//! add the cover and per-edge locals. Serialization is canonical — map keys
//! sorted, variables in id order, CPT rows in the row-major order fixed by
//! the stored parent lists — so equal models produce byte-identical
//! documents, and probabilities round-trip exactly through their shortest
//! decimal form.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::factor::Factor;
use crate::hypothesis::{HypothesisPoint, HypothesisSpace};
use crate::multinet::Multinet;
use crate::network::DiscreteNetwork;
use crate::report::ValidationReport;
use crate::simnet::{Cover, OrdinaryLocalNetwork, SimilarityNetwork};
use crate::table::Cpt;
use crate::variable::{VarId, Variable};

pub const FORMAT_VERSION: &str = "1";

/// A parsed model of any kind.
#[derive(Debug, Clone)]
pub enum ModelDocument {
    Network(DiscreteNetwork),
    Multinet(Multinet),
    Simnet(SimilarityNetwork),
}

impl ModelDocument {
    pub fn kind(&self) -> &'static str {
        match self {
            ModelDocument::Network(_) => "network",
            ModelDocument::Multinet(_) => "multinet",
            ModelDocument::Simnet(_) => "simnet",
        }
    }

    /// The model's semantic validation report.
    pub fn validate(&self) -> ValidationReport {
        match self {
            ModelDocument::Network(n) => n.validate(),
            ModelDocument::Multinet(m) => m.validate(),
            ModelDocument::Simnet(s) => s.validate(),
        }
    }
}

#[derive(Serialize, Deserialize)]
struct TopDoc {
    kind: String,
    version: String,
    model: serde_json::Value,
}

#[derive(Serialize, Deserialize)]
struct VariableDoc {
    id: String,
    name: String,
    values: Vec<String>,
}

#[derive(Serialize, Deserialize)]
struct CptDoc {
    parents: Vec<String>,
    rows: Vec<Vec<f64>>,
}

#[derive(Serialize, Deserialize)]
struct NetworkDoc {
    variables: Vec<VariableDoc>,
    arcs: Vec<(String, String)>,
    cpts: BTreeMap<String, CptDoc>,
}

#[derive(Serialize, Deserialize)]
struct MultinetDoc {
    hypothesis_vars: Vec<String>,
    blocks: Vec<Vec<Vec<String>>>,
    block_priors: Vec<f64>,
    locals: Vec<NetworkDoc>,
}

#[derive(Serialize, Deserialize)]
struct SimnetLocalDoc {
    edge: usize,
    depicted: Vec<String>,
    network: NetworkDoc,
}

#[derive(Serialize, Deserialize)]
struct SimnetDoc {
    hypothesis_vars: Vec<String>,
    cover: Vec<Vec<Vec<String>>>,
    locals: Vec<SimnetLocalDoc>,
}

/// Parse a document: syntax and schema checks only. The returned model may
/// still violate semantic invariants; see [`parse_model`] for the validating
/// variant used by everything that will go on to compute with the model.
pub fn parse_document(text: &str) -> Result<ModelDocument> {
    let top: TopDoc =
        serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
    if top.version != FORMAT_VERSION {
        return Err(Error::schema(
            "version",
            format!("unsupported version {:?}, expected \"1\"", top.version),
        ));
    }
    match top.kind.as_str() {
        "network" => {
            let doc: NetworkDoc = from_value(top.model, "model")?;
            Ok(ModelDocument::Network(network_from_doc(&doc, "model")?))
        }
        "multinet" => {
            let doc: MultinetDoc = from_value(top.model, "model")?;
            Ok(ModelDocument::Multinet(multinet_from_doc(doc)?))
        }
        "simnet" => {
            let doc: SimnetDoc = from_value(top.model, "model")?;
            Ok(ModelDocument::Simnet(simnet_from_doc(doc)?))
        }
        other => Err(Error::schema(
            "kind",
            format!("unknown kind {other:?}, expected network, multinet or simnet"),
        )),
    }
}

/// Parse and validate: schema errors carry their document path, and semantic
/// violations surface as an invalid-model error wrapping the full report.
pub fn parse_model(text: &str) -> Result<ModelDocument> {
    let doc = parse_document(text)?;
    let report = doc.validate();
    if !report.is_empty() {
        return Err(Error::Invalid(report));
    }
    Ok(doc)
}

/// Serialize a model to its canonical document text.
pub fn serialize_model(doc: &ModelDocument) -> String {
    let (kind, model) = match doc {
        ModelDocument::Network(n) => (
            "network",
            serde_json::to_value(network_to_doc(n)).expect("serializable"),
        ),
        ModelDocument::Multinet(m) => (
            "multinet",
            serde_json::to_value(multinet_to_doc(m)).expect("serializable"),
        ),
        ModelDocument::Simnet(s) => (
            "simnet",
            serde_json::to_value(simnet_to_doc(s)).expect("serializable"),
        ),
    };
    let top = TopDoc {
        kind: kind.to_owned(),
        version: FORMAT_VERSION.to_owned(),
        model,
    };
    let mut text = serde_json::to_string_pretty(&top).expect("serializable");
    text.push('\n');
    text
}

fn from_value<T: serde::de::DeserializeOwned>(value: serde_json::Value, path: &str) -> Result<T> {
    serde_json::from_value(value).map_err(|e| Error::schema(path, e.to_string()))
}

fn network_from_doc(doc: &NetworkDoc, path: &str) -> Result<DiscreteNetwork> {
    let mut variables = Vec::with_capacity(doc.variables.len());
    for (i, v) in doc.variables.iter().enumerate() {
        let var = Variable::named(v.id.clone(), v.name.clone(), v.values.clone())
            .map_err(|e| Error::schema(format!("{path}.variables[{i}]"), e.to_string()))?;
        variables.push(var);
    }
    let mut cpts = Vec::with_capacity(doc.cpts.len());
    for (child, cpt) in &doc.cpts {
        let cpt = Cpt::new(
            child.clone(),
            cpt.parents.iter().map(|p| VarId::from(p.as_str())),
            cpt.rows.iter().map(|r| r.iter().copied()),
        )
        .map_err(|e| Error::schema(format!("{path}.cpts.{child}"), e.to_string()))?;
        cpts.push(cpt);
    }
    let net = DiscreteNetwork::new(variables, cpts)
        .map_err(|e| Error::schema(format!("{path}.cpts"), e.to_string()))?;
    // The declared arc set must agree with the CPT parent lists.
    let declared: BTreeSet<(VarId, VarId)> = doc
        .arcs
        .iter()
        .map(|(a, b)| (VarId::from(a.as_str()), VarId::from(b.as_str())))
        .collect();
    let derived = net.arcs();
    if declared != derived {
        let missing: Vec<String> = derived
            .difference(&declared)
            .map(|(a, b)| format!("{a}->{b}"))
            .collect();
        let extra: Vec<String> = declared
            .difference(&derived)
            .map(|(a, b)| format!("{a}->{b}"))
            .collect();
        return Err(Error::schema(
            format!("{path}.arcs"),
            format!(
                "declared arcs disagree with cpt parents (missing: [{}], extra: [{}])",
                missing.join(", "),
                extra.join(", ")
            ),
        ));
    }
    Ok(net)
}

fn space_from_locals(
    hypothesis_vars: &[String],
    locals: &[DiscreteNetwork],
    path: &str,
) -> Result<HypothesisSpace> {
    let Some(first) = locals.first() else {
        return Err(Error::schema(path, "at least one local network is required"));
    };
    let mut vars = Vec::with_capacity(hypothesis_vars.len());
    for id in hypothesis_vars {
        let Some(v) = first.variable(id) else {
            return Err(Error::schema(
                format!("{path}.hypothesis_vars"),
                format!("hypothesis variable {id} is not defined by the local networks"),
            ));
        };
        vars.push(v.clone());
    }
    HypothesisSpace::new(vars).map_err(|e| Error::schema(path, e.to_string()))
}

fn points_from_labels(
    space: &HypothesisSpace,
    labels: &[Vec<String>],
    path: &str,
) -> Result<Vec<HypothesisPoint>> {
    labels
        .iter()
        .enumerate()
        .map(|(i, tuple)| {
            let borrowed: Vec<&str> = tuple.iter().map(String::as_str).collect();
            space
                .point(&borrowed)
                .map_err(|e| Error::schema(format!("{path}[{i}]"), e.to_string()))
        })
        .collect()
}

fn multinet_from_doc(doc: MultinetDoc) -> Result<Multinet> {
    let locals: Vec<DiscreteNetwork> = doc
        .locals
        .iter()
        .enumerate()
        .map(|(i, l)| network_from_doc(l, &format!("model.locals[{i}]")))
        .collect::<Result<_>>()?;
    let space = space_from_locals(&doc.hypothesis_vars, &locals, "model")?;
    let blocks: Vec<Vec<HypothesisPoint>> = doc
        .blocks
        .iter()
        .enumerate()
        .map(|(i, b)| points_from_labels(&space, b, &format!("model.blocks[{i}]")))
        .collect::<Result<_>>()?;
    Multinet::new(space, blocks, locals, doc.block_priors)
        .map_err(|e| Error::schema("model", e.to_string()))
}

fn simnet_from_doc(doc: SimnetDoc) -> Result<SimilarityNetwork> {
    let mut slots: Vec<Option<(Vec<String>, DiscreteNetwork)>> = Vec::new();
    slots.resize_with(doc.cover.len(), || None);
    for (i, local) in doc.locals.iter().enumerate() {
        let path = format!("model.locals[{i}]");
        if local.edge >= doc.cover.len() {
            return Err(Error::schema(
                format!("{path}.edge"),
                format!("edge index {} out of range", local.edge),
            ));
        }
        if slots[local.edge].is_some() {
            return Err(Error::schema(
                format!("{path}.edge"),
                format!("edge {} has more than one local network", local.edge),
            ));
        }
        let net = network_from_doc(&local.network, &format!("{path}.network"))?;
        let depicted: BTreeSet<&str> = local.depicted.iter().map(String::as_str).collect();
        let actual: BTreeSet<&str> = net.variables().iter().map(|v| v.id().as_str()).collect();
        if depicted != actual {
            return Err(Error::schema(
                format!("{path}.depicted"),
                "depicted list disagrees with the network's variables",
            ));
        }
        slots[local.edge] = Some((local.depicted.clone(), net));
    }
    let mut locals = Vec::with_capacity(slots.len());
    for (e, slot) in slots.into_iter().enumerate() {
        match slot {
            Some((_, net)) => locals.push(OrdinaryLocalNetwork::new(net)),
            None => {
                return Err(Error::schema(
                    "model.locals",
                    format!("cover edge {e} has no local network"),
                ))
            }
        }
    }
    let nets: Vec<DiscreteNetwork> = locals.iter().map(|l| l.network().clone()).collect();
    let space = space_from_locals(&doc.hypothesis_vars, &nets, "model")?;
    let edges: Vec<Vec<HypothesisPoint>> = doc
        .cover
        .iter()
        .enumerate()
        .map(|(i, e)| points_from_labels(&space, e, &format!("model.cover[{i}]")))
        .collect::<Result<_>>()?;
    let cover =
        Cover::new(space, edges).map_err(|e| Error::schema("model.cover", e.to_string()))?;
    SimilarityNetwork::new(cover, locals).map_err(|e| Error::schema("model", e.to_string()))
}

fn network_to_doc(net: &DiscreteNetwork) -> NetworkDoc {
    let mut variables: Vec<&Variable> = net.variables().iter().collect();
    variables.sort_by_key(|v| v.id().clone());
    let variables = variables
        .into_iter()
        .map(|v| VariableDoc {
            id: v.id().to_string(),
            name: v.name().to_owned(),
            values: v.values().to_vec(),
        })
        .collect();
    let arcs = net
        .arcs()
        .into_iter()
        .map(|(a, b)| (a.to_string(), b.to_string()))
        .collect();
    let cpts = net
        .cpts()
        .iter()
        .map(|cpt| {
            (
                cpt.child().to_string(),
                CptDoc {
                    parents: cpt.parents().iter().map(ToString::to_string).collect(),
                    rows: cpt.rows().to_vec(),
                },
            )
        })
        .collect();
    NetworkDoc {
        variables,
        arcs,
        cpts,
    }
}

fn point_labels(space: &HypothesisSpace, p: &HypothesisPoint) -> Vec<String> {
    space
        .vars()
        .iter()
        .zip(p.indices())
        .map(|(v, &i)| v.values()[i].clone())
        .collect()
}

fn multinet_to_doc(m: &Multinet) -> MultinetDoc {
    let space = m.hypothesis();
    MultinetDoc {
        hypothesis_vars: space.vars().iter().map(|v| v.id().to_string()).collect(),
        blocks: (0..m.block_count())
            .map(|i| {
                m.block_points(i)
                    .iter()
                    .map(|p| point_labels(space, p))
                    .collect()
            })
            .collect(),
        block_priors: m.block_priors().to_vec(),
        locals: m.locals().iter().map(network_to_doc).collect(),
    }
}

fn simnet_to_doc(s: &SimilarityNetwork) -> SimnetDoc {
    let space = s.space();
    SimnetDoc {
        hypothesis_vars: space.vars().iter().map(|v| v.id().to_string()).collect(),
        cover: (0..s.cover().edge_count())
            .map(|i| {
                s.cover()
                    .edge_points(i)
                    .iter()
                    .map(|p| point_labels(space, p))
                    .collect()
            })
            .collect(),
        locals: s
            .locals()
            .iter()
            .enumerate()
            .map(|(i, l)| {
                let mut depicted: Vec<String> =
                    l.network().variables().iter().map(|v| v.id().to_string()).collect();
                depicted.sort();
                SimnetLocalDoc {
                    edge: i,
                    depicted,
                    network: network_to_doc(l.network()),
                }
            })
            .collect(),
    }
}

/// The labeled output of a posterior query: one probability per hypothesis
/// point, the multiplication count, and any diagnostics the inference
/// route emitted. The posterior sums to 1 within tolerance.
#[derive(Debug, Clone)]
pub struct QueryResult {
    pub posterior: Vec<(String, f64)>,
    pub multiplications: u64,
    pub diagnostics: Vec<String>,
}

impl QueryResult {
    /// Label a posterior factor over the hypothesis domain.
    pub fn new(
        space: &HypothesisSpace,
        posterior: &Factor,
        multiplications: u64,
        diagnostics: Vec<String>,
    ) -> Self {
        let labels: Vec<String> = space.points().iter().map(|p| space.label(p)).collect();
        QueryResult {
            posterior: labels
                .into_iter()
                .zip(posterior.values().iter().copied())
                .collect(),
            multiplications,
            diagnostics,
        }
    }
}

impl std::fmt::Display for QueryResult {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        writeln!(f, "posterior:")?;
        for (label, p) in &self.posterior {
            writeln!(f, "  {label} {p}")?;
        }
        writeln!(f, "multiplications: {}", self.multiplications)?;
        if self.diagnostics.is_empty() {
            write!(f, "diagnostics: none")?;
        } else {
            write!(f, "diagnostics:")?;
            for d in &self.diagnostics {
                write!(f, "\n  {d}")?;
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;

    #[test]
    fn network_round_trip_is_exact() {
        let net = fixtures::single_network();
        let text = serialize_model(&ModelDocument::Network(net.clone()));
        let parsed = parse_model(&text).unwrap();
        let ModelDocument::Network(back) = parsed else {
            panic!("kind changed");
        };
        assert_eq!(back, net);
        // Canonical form is a fixed point of parse-then-serialize.
        assert_eq!(serialize_model(&ModelDocument::Network(back)), text);
    }

    #[test]
    fn multinet_round_trip_preserves_the_model() {
        let m = fixtures::four_way_multinet();
        let text = serialize_model(&ModelDocument::Multinet(m.clone()));
        let ModelDocument::Multinet(back) = parse_model(&text).unwrap() else {
            panic!("kind changed");
        };
        assert_eq!(back.block_priors(), m.block_priors());
        assert_eq!(back.point_priors(), m.point_priors());
        for (a, b) in back.locals().iter().zip(m.locals()) {
            assert_eq!(a.arcs(), b.arcs());
        }
        assert_eq!(serialize_model(&ModelDocument::Multinet(back)), text);
    }

    #[test]
    fn simnet_round_trip_preserves_the_model() {
        let s = fixtures::chain_simnet();
        let text = serialize_model(&ModelDocument::Simnet(s.clone()));
        let ModelDocument::Simnet(back) = parse_model(&text).unwrap() else {
            panic!("kind changed");
        };
        assert_eq!(back.cover().edge_count(), s.cover().edge_count());
        for (a, b) in back.locals().iter().zip(s.locals()) {
            assert_eq!(a.network(), b.network());
        }
        assert_eq!(serialize_model(&ModelDocument::Simnet(back)), text);
    }

    #[test]
    fn empty_document_is_a_parse_error() {
        assert!(matches!(parse_model(""), Err(Error::Parse(_))));
    }

    #[test]
    fn wrong_row_length_is_a_schema_error_naming_the_variable() {
        let net = fixtures::single_network();
        let text = serialize_model(&ModelDocument::Network(net));
        let mut doc: serde_json::Value = serde_json::from_str(&text).unwrap();
        // Truncate one of g's rows.
        doc["model"]["cpts"]["g"]["rows"][2] = serde_json::json!([0.875]);
        match parse_model(&doc.to_string()) {
            Err(Error::Schema { path, .. }) => {
                assert!(path.contains("cpts.g") || path.contains("cpts"), "{path}")
            }
            other => panic!("expected schema error, got {other:?}"),
        }
    }

    #[test]
    fn arc_mismatch_is_a_schema_error() {
        let net = fixtures::single_network();
        let text = serialize_model(&ModelDocument::Network(net));
        let mut doc: serde_json::Value = serde_json::from_str(&text).unwrap();
        let arcs = doc["model"]["arcs"].as_array_mut().unwrap();
        arcs.remove(0); // drop a declared arc the cpts still imply
        match parse_model(&doc.to_string()) {
            Err(Error::Schema { path, .. }) => assert!(path.ends_with("arcs"), "{path}"),
            other => panic!("expected schema error, got {other:?}"),
        }
    }

    #[test]
    fn semantic_violations_surface_as_invalid() {
        let net = crate::DiscreteNetwork::builder()
            .variable("x", ["0", "1"])
            .cpt("x", [] as [&str; 0], [[0.5, 0.6]])
            .build()
            .unwrap();
        let text = serialize_model(&ModelDocument::Network(net));
        assert!(matches!(parse_model(&text), Err(Error::Invalid(_))));
        // The non-validating parse still returns the value for diagnosis.
        assert!(parse_document(&text).is_ok());
    }

    #[test]
    fn unknown_kind_is_a_schema_error() {
        let text = r#"{"kind": "mystery", "version": "1", "model": {}}"#;
        assert!(matches!(parse_model(text), Err(Error::Schema { .. })));
    }

    #[test]
    fn version_is_checked() {
        let text = r#"{"kind": "network", "version": "2", "model": {}}"#;
        assert!(matches!(parse_model(text), Err(Error::Schema { .. })));
    }
}
