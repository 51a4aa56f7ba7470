//! Seeded random model families for oracle-equivalence testing.
//!
//! Everything here is deterministic in the seed: the generator is a
//! self-contained splitmix64, so the families are bit-stable across
//! platforms and releases. The multinet families plant asymmetric
//! independence by construction — every block drops arcs relative to the
//! union backbone — which is what the cross-representation and cost
//! comparisons quantify.

use crate::assignment::Assignment;
use crate::error::Result;
use crate::hypothesis::{HypothesisPoint, HypothesisSpace};
use crate::joint::JointTable;
use crate::multinet::Multinet;
use crate::network::DiscreteNetwork;
use crate::shape;
use crate::simnet::{
    comprehensive_from_joint, relevance_prune, Cover, OrdinaryLocalNetwork, SimilarityNetwork,
};
use crate::table::Cpt;
use crate::variable::{VarId, Variable};

/// Deterministic splitmix64 generator.
#[derive(Debug, Clone)]
pub struct Rng {
    state: u64,
}

impl Rng {
    pub fn new(seed: u64) -> Self {
        Rng { state: seed }
    }

    pub fn next_u64(&mut self) -> u64 {
        self.state = self.state.wrapping_add(0x9e3779b97f4a7c15);
        let mut z = self.state;
        z = (z ^ (z >> 30)).wrapping_mul(0xbf58476d1ce4e5b9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94d049bb133111eb);
        z ^ (z >> 31)
    }

    /// Uniform in [0, 1).
    pub fn next_f64(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 / (1u64 << 53) as f64
    }

    /// Uniform in 0..bound.
    pub fn below(&mut self, bound: usize) -> usize {
        (self.next_u64() % bound as u64) as usize
    }

    pub fn chance(&mut self, p: f64) -> bool {
        self.next_f64() < p
    }
}

/// A probability row bounded away from zero, so generated models keep every
/// event possible (evidence sampling and prior recovery stay well defined).
fn positive_row(rng: &mut Rng, len: usize) -> Vec<f64> {
    let raw: Vec<f64> = (0..len).map(|_| 0.1 + rng.next_f64()).collect();
    let total: f64 = raw.iter().sum();
    raw.into_iter().map(|v| v / total).collect()
}

/// Shape of a random single network.
#[derive(Debug, Clone)]
pub struct NetworkConfig {
    pub variables: usize,
    pub max_cardinality: usize,
    pub arc_probability: f64,
    /// Allow zero entries in CPT rows (off for families that need strict
    /// positivity).
    pub allow_zeros: bool,
}

impl Default for NetworkConfig {
    fn default() -> Self {
        NetworkConfig {
            variables: 5,
            max_cardinality: 3,
            arc_probability: 0.4,
            allow_zeros: false,
        }
    }
}

/// A random valid network: variables `x0..`, arcs only forward in index
/// order, rows normalized.
pub fn random_network(rng: &mut Rng, cfg: &NetworkConfig) -> DiscreteNetwork {
    let cards: Vec<usize> = (0..cfg.variables)
        .map(|_| 2 + rng.below(cfg.max_cardinality - 1))
        .collect();
    let names: Vec<String> = (0..cfg.variables).map(|i| format!("x{i}")).collect();
    let mut variables = Vec::with_capacity(cfg.variables);
    for (name, &card) in names.iter().zip(&cards) {
        let values: Vec<String> = (0..card).map(|v| format!("v{v}")).collect();
        variables.push(Variable::new(name.as_str(), values).unwrap());
    }
    let mut cpts = Vec::with_capacity(cfg.variables);
    for i in 0..cfg.variables {
        let parents: Vec<usize> = (0..i).filter(|_| rng.chance(cfg.arc_probability)).collect();
        let row_count: usize = parents.iter().map(|&p| cards[p]).product();
        let rows: Vec<Vec<f64>> = (0..row_count)
            .map(|_| {
                if cfg.allow_zeros && rng.chance(0.3) {
                    let mut row = vec![0.0; cards[i]];
                    row[rng.below(cards[i])] = 1.0;
                    row
                } else {
                    positive_row(rng, cards[i])
                }
            })
            .collect();
        let parent_ids: Vec<&str> = parents.iter().map(|&p| names[p].as_str()).collect();
        cpts.push(Cpt::new(names[i].as_str(), parent_ids, rows).unwrap());
    }
    DiscreteNetwork::new(variables, cpts).unwrap()
}

/// A full assignment with positive probability, sampled from the joint.
pub fn positive_assignment(rng: &mut Rng, joint: &JointTable) -> Assignment {
    let cards: Vec<usize> = joint.scope().iter().map(|v| v.cardinality()).collect();
    let mut target = rng.next_f64() * joint.total();
    let mut chosen = joint.values().len() - 1;
    for (flat, &v) in joint.values().iter().enumerate() {
        if v <= 0.0 {
            continue;
        }
        target -= v;
        if target <= 0.0 {
            chosen = flat;
            break;
        }
    }
    let mut idx = vec![0usize; cards.len()];
    shape::unravel(chosen, &cards, &mut idx);
    let mut a = Assignment::new();
    for (v, &i) in joint.scope().iter().zip(&idx) {
        a.bind(v.id().clone(), i);
    }
    a
}

/// Shape of a random multinet family with planted asymmetric independence.
#[derive(Debug, Clone)]
pub struct FamilyConfig {
    pub hypothesis_cardinality: usize,
    pub blocks: usize,
    /// Smallest number of hypothesis values per block. Two or more makes the
    /// restricted-cardinality savings real; one is allowed for families that
    /// only check posterior agreement.
    pub min_block_size: usize,
    pub clue_variables: usize,
    pub max_clue_cardinality: usize,
    /// Probability of a clue-to-clue backbone arc.
    pub clue_arc_probability: f64,
    /// Clue variables that are irrelevant inside each block: they lose their
    /// hypothesis arc and every backbone arc tying them to the relevant
    /// clues, forming a hypothesis-independent island (the pattern behind
    /// both kinds of savings and behind similarity-network pruning).
    pub irrelevant_clues_per_block: usize,
}

impl Default for FamilyConfig {
    fn default() -> Self {
        FamilyConfig {
            hypothesis_cardinality: 6,
            blocks: 2,
            min_block_size: 2,
            clue_variables: 4,
            max_clue_cardinality: 3,
            clue_arc_probability: 0.35,
            irrelevant_clues_per_block: 2,
        }
    }
}

/// A random multinet over one hypothesis variable `h` and clue variables
/// `x0..`, sharing a backbone (h feeding every clue, forward clue-to-clue
/// arcs) from which every block cuts its own irrelevant clues loose. Every
/// clue stays relevant in at least one block, so each cut is a genuine
/// saving relative to the union network, and all probabilities are strictly
/// positive.
pub fn random_multinet(rng: &mut Rng, cfg: &FamilyConfig) -> Multinet {
    assert!(cfg.blocks >= 2, "a family needs at least two blocks");
    assert!(cfg.min_block_size >= 1);
    assert!(
        cfg.hypothesis_cardinality >= cfg.min_block_size * cfg.blocks,
        "hypothesis cardinality too small for the requested blocks"
    );
    assert!(
        cfg.irrelevant_clues_per_block * cfg.blocks
            <= cfg.clue_variables * (cfg.blocks - 1),
        "every clue must stay relevant somewhere"
    );

    let h_card = cfg.hypothesis_cardinality;
    let h_values: Vec<String> = (0..h_card).map(|v| format!("h{v}")).collect();
    let h_var = Variable::new("h", h_values).unwrap();
    let space = HypothesisSpace::new(vec![h_var.clone()]).unwrap();

    let clue_cards: Vec<usize> = (0..cfg.clue_variables)
        .map(|_| 2 + rng.below(cfg.max_clue_cardinality - 1))
        .collect();
    let clue_names: Vec<String> = (0..cfg.clue_variables).map(|i| format!("x{i}")).collect();

    // Backbone clue-to-clue arcs, shared by every block.
    let mut clue_parents: Vec<Vec<usize>> = vec![Vec::new(); cfg.clue_variables];
    for j in 1..cfg.clue_variables {
        for i in 0..j {
            if rng.chance(cfg.clue_arc_probability) {
                clue_parents[j].push(i);
            }
        }
    }

    // Partition the hypothesis values into contiguous blocks of the minimum
    // size or larger.
    let mut boundaries: Vec<usize> = Vec::new();
    let mut cursor = 0;
    for remaining in (1..cfg.blocks).rev() {
        let max_here = h_card - cfg.min_block_size * remaining;
        let size = cfg.min_block_size + rng.below(max_here - cursor - cfg.min_block_size + 1);
        cursor += size;
        boundaries.push(cursor);
    }
    let mut blocks_idx: Vec<Vec<usize>> = Vec::new();
    let mut start = 0;
    for &end in boundaries.iter().chain(std::iter::once(&h_card)) {
        blocks_idx.push((start..end).collect());
        start = end;
    }

    // Round-robin island assignment keeps every clue relevant somewhere.
    let islands: Vec<std::collections::BTreeSet<usize>> = (0..cfg.blocks)
        .map(|b| {
            (0..cfg.irrelevant_clues_per_block)
                .map(|i| (b + i * cfg.blocks) % cfg.clue_variables)
                .collect()
        })
        .collect();

    let mut locals = Vec::with_capacity(cfg.blocks);
    for (b, block) in blocks_idx.iter().enumerate() {
        let island = &islands[b];
        let mut variables = vec![h_var.clone()];
        for (name, &card) in clue_names.iter().zip(&clue_cards) {
            let values: Vec<String> = (0..card).map(|v| format!("v{v}")).collect();
            variables.push(Variable::new(name.as_str(), values).unwrap());
        }
        let mut cpts = Vec::with_capacity(1 + cfg.clue_variables);
        let within = positive_row(rng, block.len());
        let mut h_row = vec![0.0; h_card];
        for (&value, &mass) in block.iter().zip(&within) {
            h_row[value] = mass;
        }
        cpts.push(Cpt::new("h", [] as [&str; 0], [h_row]).unwrap());
        for j in 0..cfg.clue_variables {
            let mut parent_ids: Vec<VarId> = Vec::new();
            let mut parent_cards: Vec<usize> = Vec::new();
            if !island.contains(&j) {
                parent_ids.push("h".into());
                parent_cards.push(h_card);
            }
            for &p in &clue_parents[j] {
                // Arcs crossing the island boundary are cut in this block.
                if island.contains(&p) != island.contains(&j) {
                    continue;
                }
                parent_ids.push(clue_names[p].as_str().into());
                parent_cards.push(clue_cards[p]);
            }
            let rows: Vec<Vec<f64>> = (0..shape::size(&parent_cards))
                .map(|_| positive_row(rng, clue_cards[j]))
                .collect();
            cpts.push(Cpt::new(clue_names[j].as_str(), parent_ids, rows).unwrap());
        }
        locals.push(DiscreteNetwork::new(variables, cpts).unwrap());
    }

    let blocks: Vec<Vec<HypothesisPoint>> = blocks_idx
        .iter()
        .map(|b| b.iter().map(|&v| HypothesisPoint(vec![v])).collect())
        .collect();
    let block_priors = positive_row(rng, cfg.blocks);
    Multinet::new(space, blocks, locals, block_priors).unwrap()
}

/// The family shape used by the cross-representation agreement suites:
/// at most six variables with cardinalities at most three, so the whole
/// joint enumerates instantly, with two blocks and two irrelevant clues per
/// block. Block size one is allowed (the three-way hypothesis splits 1+2).
pub fn cross_representation_config() -> FamilyConfig {
    FamilyConfig {
        hypothesis_cardinality: 3,
        blocks: 2,
        min_block_size: 1,
        clue_variables: 4,
        max_clue_cardinality: 3,
        clue_arc_probability: 0.35,
        irrelevant_clues_per_block: 2,
    }
}

/// Turn a multinet into a similarity network over a chain cover: one edge per
/// block (its local network relevance-pruned) plus two-point bridge edges
/// between consecutive blocks, whose comprehensive networks are read off the
/// mixture joint.
pub fn simnet_from_multinet(m: &Multinet) -> Result<SimilarityNetwork> {
    let space = m.hypothesis().clone();
    let joint = m.union_network()?.network.enumerate_joint()?;

    // Full-chain structure for the bridge networks: hypothesis variables
    // first, then the clue variables in id order, each conditioned on
    // everything before it.
    let mut structure: Vec<(VarId, Vec<VarId>)> = Vec::new();
    let mut seen: Vec<VarId> = Vec::new();
    for hv in space.vars() {
        structure.push((hv.id().clone(), seen.clone()));
        seen.push(hv.id().clone());
    }
    for v in joint.scope() {
        if !space.contains_var(v.id().as_str()) {
            structure.push((v.id().clone(), seen.clone()));
            seen.push(v.id().clone());
        }
    }

    let mut edges: Vec<Vec<HypothesisPoint>> = Vec::new();
    let mut locals: Vec<OrdinaryLocalNetwork> = Vec::new();
    for b in 0..m.block_count() {
        let block_points = m.block_points(b);
        let pruned = relevance_prune(&m.locals()[b], &space, &block_points)?;
        edges.push(block_points);
        locals.push(OrdinaryLocalNetwork::new(pruned));
        if b + 1 < m.block_count() {
            let bridge = vec![
                m.block_points(b).last().unwrap().clone(),
                m.block_points(b + 1)[0].clone(),
            ];
            let net = comprehensive_from_joint(&joint, &space, &bridge, &structure)?;
            edges.push(bridge);
            locals.push(OrdinaryLocalNetwork::new(net));
        }
    }
    let cover = Cover::new(space, edges)?;
    SimilarityNetwork::new(cover, locals)
}

/// A randomized two-hypothesis-variable multinet shaped like the two-person
/// story: one block where the identities are independent and the clue is
/// constant, one block correlating them.
pub fn random_paired_multinet(rng: &mut Rng) -> Multinet {
    let ids3 = ["w", "v", "s"];
    let h1 = Variable::new("h1", ids3).unwrap();
    let h2 = Variable::new("h2", ids3).unwrap();
    let c = Variable::new("c", ["yes", "no"]).unwrap();
    let space = HypothesisSpace::new(vec![h1.clone(), h2.clone()]).unwrap();

    // Block 1: both identities in {v, s}, independent; clue constant.
    let half = |rng: &mut Rng| {
        let row = positive_row(rng, 2);
        vec![0.0, row[0], row[1]]
    };
    let no_worker = DiscreteNetwork::new(
        vec![h1.clone(), h2.clone(), c.clone()],
        vec![
            Cpt::new("h1", [] as [&str; 0], [half(rng)]).unwrap(),
            Cpt::new("h2", [] as [&str; 0], [half(rng)]).unwrap(),
            Cpt::new("c", [] as [&str; 0], [positive_row(rng, 2)]).unwrap(),
        ],
    )
    .unwrap();

    // Block 2: at least one worker; h2 depends on h1, the clue on both.
    let h1_row = positive_row(rng, 3);
    let h2_rows = vec![
        positive_row(rng, 3),   // h1 = w: anything
        vec![1.0, 0.0, 0.0],    // h1 = v: h2 must be w
        vec![1.0, 0.0, 0.0],    // h1 = s: h2 must be w
    ];
    let c_rows: Vec<Vec<f64>> = (0..9).map(|_| positive_row(rng, 2)).collect();
    let with_worker = DiscreteNetwork::new(
        vec![h1, h2, c],
        vec![
            Cpt::new("h1", [] as [&str; 0], [h1_row]).unwrap(),
            Cpt::new("h2", ["h1"], h2_rows).unwrap(),
            Cpt::new("c", ["h1", "h2"], c_rows).unwrap(),
        ],
    )
    .unwrap();

    let pt = |a: &str, b: &str| space.point(&[a, b]).unwrap();
    let blocks = vec![
        vec![pt("v", "v"), pt("v", "s"), pt("s", "v"), pt("s", "s")],
        vec![pt("w", "w"), pt("w", "v"), pt("w", "s"), pt("v", "w"), pt("s", "w")],
    ];
    let priors = positive_row(rng, 2);
    Multinet::new(space, blocks, vec![no_worker, with_worker], priors).unwrap()
}

/// The three-edge connected cover of the nine identity pairs, with local
/// networks for the mixed edges derived from the generating joint.
pub fn paired_simnet_from(m: &Multinet) -> Result<SimilarityNetwork> {
    let space = m.hypothesis().clone();
    let joint = m.union_network()?.network.enumerate_joint()?;
    let pt = |a: &str, b: &str| space.point(&[a, b]).unwrap();
    let edges = vec![
        vec![pt("s", "s"), pt("v", "s"), pt("s", "v"), pt("v", "v")],
        vec![pt("v", "v"), pt("w", "v"), pt("v", "w"), pt("w", "w")],
        vec![pt("s", "s"), pt("s", "w"), pt("w", "s")],
    ];
    let structure = vec![
        ("h1".into(), vec![]),
        ("h2".into(), vec!["h1".into()]),
        ("c".into(), vec!["h1".into(), "h2".into()]),
    ];
    let sv = comprehensive_from_joint(&joint, &space, &edges[0], &structure)?;
    let sv = relevance_prune(&sv, &space, &edges[0])?;
    let mid = comprehensive_from_joint(&joint, &space, &edges[1], &structure)?;
    let bridge = comprehensive_from_joint(&joint, &space, &edges[2], &structure)?;
    let cover = Cover::new(space, edges)?;
    SimilarityNetwork::new(
        cover,
        vec![
            OrdinaryLocalNetwork::new(sv),
            OrdinaryLocalNetwork::new(mid),
            OrdinaryLocalNetwork::new(bridge),
        ],
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn generator_is_deterministic() {
        let a = random_network(&mut Rng::new(42), &NetworkConfig::default());
        let b = random_network(&mut Rng::new(42), &NetworkConfig::default());
        assert_eq!(a, b);
    }

    #[test]
    fn random_networks_validate() {
        let mut rng = Rng::new(7);
        for _ in 0..20 {
            let net = random_network(&mut rng, &NetworkConfig::default());
            assert!(net.validate().is_empty());
        }
    }

    #[test]
    fn random_multinets_validate() {
        let mut rng = Rng::new(11);
        for _ in 0..10 {
            let m = random_multinet(&mut rng, &FamilyConfig::default());
            let report = m.validate();
            assert!(report.is_empty(), "{report}");
        }
    }

    #[test]
    fn derived_simnets_validate_and_reconstruct() {
        let mut rng = Rng::new(13);
        let m = random_multinet(&mut rng, &FamilyConfig::default());
        let s = simnet_from_multinet(&m).unwrap();
        let report = s.validate();
        assert!(report.is_empty(), "{report}");
        let reconstructed = crate::simnet::reconstruct_joint(&s).unwrap();
        let mixture = m.union_network().unwrap().network.enumerate_joint().unwrap();
        assert!(reconstructed.max_abs_difference(&mixture).unwrap() < 1e-9);
    }

    #[test]
    fn paired_families_reconstruct() {
        let mut rng = Rng::new(17);
        let m = random_paired_multinet(&mut rng);
        assert!(m.validate().is_empty());
        let s = paired_simnet_from(&m).unwrap();
        let reconstructed = crate::simnet::reconstruct_joint(&s).unwrap();
        let mixture = m.union_network().unwrap().network.enumerate_joint().unwrap();
        assert!(reconstructed.max_abs_difference(&mixture).unwrap() < 1e-9);
    }
}
