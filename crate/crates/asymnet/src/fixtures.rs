//! Ready-made models of the security-checkpoint story used throughout the
//! documentation and tests.
//!
//! A guard classifies each person approaching a building. In the three-way
//! story the identity `h` is worker, visitor or spy, and the clues are gender
//! `g` and badge-wearing `b`: spies are mostly men and always wear badges,
//! visitors never wear badges, and among workers badge-wearing depends on
//! gender. The four-way story adds executives and a limousine clue `l`:
//! only executives arrive in limousines, and executives share the workers'
//! gender and badge behaviour.
//!
//! All probabilities are dyadic, so mixtures and marginals computed from
//! these fixtures are exact in double precision.

use crate::hypothesis::HypothesisSpace;
use crate::multinet::Multinet;
use crate::network::DiscreteNetwork;
use crate::simnet::{comprehensive_from_joint, Cover, OrdinaryLocalNetwork, SimilarityNetwork};
use crate::variable::{ids, Variable};

/// The three-way story as a single network: h -> g, h -> b, g -> b.
///
/// The arc g -> b exists only because gender and badge-wearing are related
/// for workers, but the topology cannot say so; 11 free parameters.
pub fn single_network() -> DiscreteNetwork {
    DiscreteNetwork::builder()
        .named_variable("h", "identity", ["worker", "visitor", "spy"])
        .named_variable("g", "gender", ["male", "female"])
        .named_variable("b", "badge", ["yes", "no"])
        .cpt("h", [] as [&str; 0], [[0.5, 0.25, 0.25]])
        .cpt("g", ["h"], [[0.75, 0.25], [0.5, 0.5], [0.875, 0.125]])
        .cpt(
            "b",
            ["g", "h"],
            [
                [0.25, 0.75], // male worker
                [0.0, 1.0],   // male visitor
                [1.0, 0.0],   // male spy
                [0.75, 0.25], // female worker
                [0.0, 1.0],   // female visitor
                [1.0, 0.0],   // female spy
            ],
        )
        .build()
        .expect("fixture is well formed")
}

/// The same distribution as [`single_network`], split into a multinet with
/// blocks {visitor, spy} and {worker}; 9 stored parameters.
///
/// Conditioned on the first block, badge-wearing no longer depends on gender,
/// so the spy/visitor local network drops the g -> b arc.
pub fn split_multinet() -> Multinet {
    let space = HypothesisSpace::new(vec![Variable::named(
        "h",
        "identity",
        ["worker", "visitor", "spy"],
    )
    .unwrap()])
    .unwrap();
    let sv_local = DiscreteNetwork::builder()
        .named_variable("h", "identity", ["worker", "visitor", "spy"])
        .named_variable("g", "gender", ["male", "female"])
        .named_variable("b", "badge", ["yes", "no"])
        .cpt("h", [] as [&str; 0], [[0.0, 0.5, 0.5]])
        .cpt("g", ["h"], [[0.5, 0.5], [0.5, 0.5], [0.875, 0.125]])
        .cpt("b", ["h"], [[0.5, 0.5], [0.0, 1.0], [1.0, 0.0]])
        .build()
        .unwrap();
    let worker_local = DiscreteNetwork::builder()
        .named_variable("h", "identity", ["worker", "visitor", "spy"])
        .named_variable("g", "gender", ["male", "female"])
        .named_variable("b", "badge", ["yes", "no"])
        .cpt("h", [] as [&str; 0], [[1.0, 0.0, 0.0]])
        .cpt("g", [] as [&str; 0], [[0.75, 0.25]])
        .cpt("b", ["g"], [[0.25, 0.75], [0.75, 0.25]])
        .build()
        .unwrap();
    let blocks = vec![
        vec![space.point(&["visitor"]).unwrap(), space.point(&["spy"]).unwrap()],
        vec![space.point(&["worker"]).unwrap()],
    ];
    Multinet::new(space, blocks, vec![sv_local, worker_local], vec![0.5, 0.5])
        .expect("fixture is well formed")
}

/// The four-way story as a multinet with blocks {visitor, spy} and
/// {worker, executive}.
///
/// In the worker/executive block neither gender nor badge-wearing depends on
/// the hypothesis (executives behave like workers), so the whole clue pair
/// (g, b) has one shared table there; in the spy/visitor block the limousine
/// clue is irrelevant and stays disconnected.
pub fn four_way_multinet() -> Multinet {
    let space = HypothesisSpace::new(vec![Variable::named(
        "h",
        "identity",
        ["worker", "executive", "visitor", "spy"],
    )
    .unwrap()])
    .unwrap();
    let sv_local = DiscreteNetwork::builder()
        .named_variable("h", "identity", ["worker", "executive", "visitor", "spy"])
        .named_variable("g", "gender", ["male", "female"])
        .named_variable("b", "badge", ["yes", "no"])
        .named_variable("l", "limousine", ["yes", "no"])
        .cpt("h", [] as [&str; 0], [[0.0, 0.0, 0.5, 0.5]])
        .cpt(
            "g",
            ["h"],
            [[0.5, 0.5], [0.5, 0.5], [0.5, 0.5], [0.875, 0.125]],
        )
        .cpt(
            "b",
            ["h"],
            [[0.5, 0.5], [0.5, 0.5], [0.0, 1.0], [1.0, 0.0]],
        )
        .cpt("l", [] as [&str; 0], [[0.0, 1.0]])
        .build()
        .unwrap();
    let we_local = DiscreteNetwork::builder()
        .named_variable("h", "identity", ["worker", "executive", "visitor", "spy"])
        .named_variable("g", "gender", ["male", "female"])
        .named_variable("b", "badge", ["yes", "no"])
        .named_variable("l", "limousine", ["yes", "no"])
        .cpt("h", [] as [&str; 0], [[0.75, 0.25, 0.0, 0.0]])
        .cpt("g", [] as [&str; 0], [[0.75, 0.25]])
        .cpt("b", ["g"], [[0.25, 0.75], [0.75, 0.25]])
        .cpt(
            "l",
            ["h"],
            [[0.0, 1.0], [0.75, 0.25], [0.5, 0.5], [0.5, 0.5]],
        )
        .build()
        .unwrap();
    let blocks = vec![
        vec![
            space.point(&["visitor"]).unwrap(),
            space.point(&["spy"]).unwrap(),
        ],
        vec![
            space.point(&["worker"]).unwrap(),
            space.point(&["executive"]).unwrap(),
        ],
    ];
    Multinet::new(space, blocks, vec![sv_local, we_local], vec![0.5, 0.5])
        .expect("fixture is well formed")
}

/// A prior network for staged inference: two independent reports, economic
/// `r1` and military `r2`, both raise the chance that the arrival is a spy.
///
/// The clue networks of [`split_multinet`] ignore these a-priori factors;
/// staged inference first revises the hypothesis prior with this network and
/// then weighs the clues.
pub fn report_prior_network() -> DiscreteNetwork {
    DiscreteNetwork::builder()
        .named_variable("h", "identity", ["worker", "visitor", "spy"])
        .named_variable("r1", "economic report", ["quiet", "alarming"])
        .named_variable("r2", "military report", ["quiet", "alarming"])
        .cpt("r1", [] as [&str; 0], [[0.75, 0.25]])
        .cpt("r2", [] as [&str; 0], [[0.5, 0.5]])
        .cpt(
            "h",
            ["r1", "r2"],
            [
                [0.625, 0.25, 0.125],   // quiet, quiet
                [0.5, 0.25, 0.25],      // quiet, alarming
                [0.5, 0.25, 0.25],      // alarming, quiet
                [0.125, 0.125, 0.75],   // alarming, alarming
            ],
        )
        .build()
        .expect("fixture is well formed")
}

/// The four-way story as a similarity network over the connected chain cover
/// {visitor, spy}, {visitor, worker}, {worker, executive}.
///
/// Each local network keeps only the variables that help distinguish its own
/// pair: the limousine clue appears only in the worker/executive network, and
/// the gender-badge relationship only where a worker is among the candidates.
/// Encodes the same distribution as [`four_way_multinet`].
pub fn chain_simnet() -> SimilarityNetwork {
    let space = HypothesisSpace::new(vec![Variable::named(
        "h",
        "identity",
        ["worker", "executive", "visitor", "spy"],
    )
    .unwrap()])
    .unwrap();
    let sv = DiscreteNetwork::builder()
        .named_variable("h", "identity", ["worker", "executive", "visitor", "spy"])
        .named_variable("g", "gender", ["male", "female"])
        .named_variable("b", "badge", ["yes", "no"])
        .cpt("h", [] as [&str; 0], [[0.0, 0.0, 0.5, 0.5]])
        .cpt(
            "g",
            ["h"],
            [[0.5, 0.5], [0.5, 0.5], [0.5, 0.5], [0.875, 0.125]],
        )
        .cpt(
            "b",
            ["h"],
            [[0.5, 0.5], [0.5, 0.5], [0.0, 1.0], [1.0, 0.0]],
        )
        .build()
        .unwrap();
    let vw = DiscreteNetwork::builder()
        .named_variable("h", "identity", ["worker", "executive", "visitor", "spy"])
        .named_variable("g", "gender", ["male", "female"])
        .named_variable("b", "badge", ["yes", "no"])
        .cpt("h", [] as [&str; 0], [[0.6, 0.0, 0.4, 0.0]])
        .cpt(
            "g",
            ["h"],
            [[0.75, 0.25], [0.5, 0.5], [0.5, 0.5], [0.5, 0.5]],
        )
        .cpt(
            "b",
            ["g", "h"],
            [
                [0.25, 0.75], // male worker
                [0.5, 0.5],
                [0.0, 1.0], // male visitor
                [0.5, 0.5],
                [0.75, 0.25], // female worker
                [0.5, 0.5],
                [0.0, 1.0], // female visitor
                [0.5, 0.5],
            ],
        )
        .build()
        .unwrap();
    let we = DiscreteNetwork::builder()
        .named_variable("h", "identity", ["worker", "executive", "visitor", "spy"])
        .named_variable("l", "limousine", ["yes", "no"])
        .cpt("h", [] as [&str; 0], [[0.75, 0.25, 0.0, 0.0]])
        .cpt(
            "l",
            ["h"],
            [[0.0, 1.0], [0.75, 0.25], [0.5, 0.5], [0.5, 0.5]],
        )
        .build()
        .unwrap();
    let cover = Cover::new(
        space.clone(),
        vec![
            vec![space.point(&["visitor"]).unwrap(), space.point(&["spy"]).unwrap()],
            vec![space.point(&["visitor"]).unwrap(), space.point(&["worker"]).unwrap()],
            vec![space.point(&["worker"]).unwrap(), space.point(&["executive"]).unwrap()],
        ],
    )
    .unwrap();
    SimilarityNetwork::new(
        cover,
        vec![
            OrdinaryLocalNetwork::new(sv),
            OrdinaryLocalNetwork::new(vw),
            OrdinaryLocalNetwork::new(we),
        ],
    )
    .expect("fixture is well formed")
}

/// The two-person story: a pair of arrivals is classified at once.
///
/// `h1` and `h2` are the identities, and the clue `c` records whether the two
/// converse (only workers do, and workers tend to arrive together). In the
/// block where both are spies or visitors the identities are independent of
/// each other — inter-hypothesis independence — and conversing is impossible;
/// the other block correlates the identities and gives the clue its tables.
pub fn paired_multinet() -> Multinet {
    let space = HypothesisSpace::new(vec![
        Variable::named("h1", "first identity", ["worker", "visitor", "spy"]).unwrap(),
        Variable::named("h2", "second identity", ["worker", "visitor", "spy"]).unwrap(),
    ])
    .unwrap();
    let no_worker = DiscreteNetwork::builder()
        .named_variable("h1", "first identity", ["worker", "visitor", "spy"])
        .named_variable("h2", "second identity", ["worker", "visitor", "spy"])
        .named_variable("c", "conversing", ["yes", "no"])
        .cpt("h1", [] as [&str; 0], [[0.0, 0.5, 0.5]])
        .cpt("h2", [] as [&str; 0], [[0.0, 0.5, 0.5]])
        .cpt("c", [] as [&str; 0], [[0.0, 1.0]])
        .build()
        .unwrap();
    let with_worker = DiscreteNetwork::builder()
        .named_variable("h1", "first identity", ["worker", "visitor", "spy"])
        .named_variable("h2", "second identity", ["worker", "visitor", "spy"])
        .named_variable("c", "conversing", ["yes", "no"])
        .cpt("h1", [] as [&str; 0], [[0.5, 0.25, 0.25]])
        .cpt(
            "h2",
            ["h1"],
            [[0.5, 0.25, 0.25], [1.0, 0.0, 0.0], [1.0, 0.0, 0.0]],
        )
        .cpt(
            "c",
            ["h1", "h2"],
            [
                [0.75, 0.25], // worker, worker
                [0.25, 0.75], // worker, visitor
                [0.25, 0.75], // worker, spy
                [0.25, 0.75], // visitor, worker
                [0.0, 1.0],
                [0.0, 1.0],
                [0.25, 0.75], // spy, worker
                [0.0, 1.0],
                [0.0, 1.0],
            ],
        )
        .build()
        .unwrap();
    let pts = |pairs: &[(&str, &str)]| -> Vec<crate::hypothesis::HypothesisPoint> {
        pairs
            .iter()
            .map(|(a, b)| space.point(&[a, b]).unwrap())
            .collect()
    };
    let blocks = vec![
        pts(&[
            ("visitor", "visitor"),
            ("visitor", "spy"),
            ("spy", "visitor"),
            ("spy", "spy"),
        ]),
        pts(&[
            ("worker", "worker"),
            ("worker", "visitor"),
            ("worker", "spy"),
            ("visitor", "worker"),
            ("spy", "worker"),
        ]),
    ];
    Multinet::new(
        space,
        blocks,
        vec![no_worker, with_worker],
        vec![0.5, 0.5],
    )
    .expect("fixture is well formed")
}

/// The three-edge connected cover of the nine identity pairs used by the
/// generalized similarity network of the two-person story: one edge for the
/// spy/visitor pairs, one for the pairs with at least one visitor-or-worker,
/// and one bridging edge through (spy, spy) and the worker pairs.
pub fn paired_cover() -> Cover {
    let space = paired_multinet().hypothesis().clone();
    let inner = space.clone();
    let pts = move |pairs: &[(&str, &str)]| -> Vec<crate::hypothesis::HypothesisPoint> {
        pairs
            .iter()
            .map(|(a, b)| inner.point(&[a, b]).unwrap())
            .collect()
    };
    Cover::new(
        space,
        vec![
            pts(&[
                ("spy", "spy"),
                ("visitor", "spy"),
                ("spy", "visitor"),
                ("visitor", "visitor"),
            ]),
            pts(&[
                ("visitor", "visitor"),
                ("worker", "visitor"),
                ("visitor", "worker"),
                ("worker", "worker"),
            ]),
            pts(&[("spy", "spy"), ("spy", "worker"), ("worker", "spy")]),
        ],
    )
    .expect("fixture is well formed")
}

/// A generalized similarity network for the two-person story, built on
/// [`paired_cover`]. The local networks of the two mixed edges are derived
/// from the story's full joint; the spy/visitor edge keeps the pruned
/// network in which the two identities are independent and the conversing
/// clue does not appear at all.
pub fn paired_simnet() -> SimilarityNetwork {
    let m = paired_multinet();
    let space = m.hypothesis().clone();
    let joint = m
        .union_network()
        .expect("fixture flattens")
        .network
        .enumerate_joint()
        .expect("fixture is small");
    let cover = paired_cover();
    let structure = vec![
        ("h1".into(), ids([] as [&str; 0])),
        ("h2".into(), ids(["h1"])),
        ("c".into(), ids(["h1", "h2"])),
    ];
    let sv_edge = cover.edge_points(0);
    let sv_comprehensive =
        comprehensive_from_joint(&joint, &space, &sv_edge, &structure).unwrap();
    let sv_ordinary =
        crate::simnet::relevance_prune(&sv_comprehensive, &space, &sv_edge).unwrap();
    let mid = comprehensive_from_joint(&joint, &space, &cover.edge_points(1), &structure).unwrap();
    let bridge =
        comprehensive_from_joint(&joint, &space, &cover.edge_points(2), &structure).unwrap();
    SimilarityNetwork::new(
        cover,
        vec![
            OrdinaryLocalNetwork::new(sv_ordinary),
            OrdinaryLocalNetwork::new(mid),
            OrdinaryLocalNetwork::new(bridge),
        ],
    )
    .expect("fixture is well formed")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fixtures_validate() {
        assert!(single_network().validate().is_empty());
        assert!(split_multinet().validate().is_empty());
        assert!(four_way_multinet().validate().is_empty());
        assert!(report_prior_network().validate().is_empty());
        assert!(chain_simnet().validate().is_empty());
        assert!(paired_multinet().validate().is_empty());
        assert!(paired_simnet().validate().is_empty());
    }

    #[test]
    fn parameter_counts_match_the_story() {
        assert_eq!(single_network().free_parameter_count(), 11);
        assert_eq!(split_multinet().parameter_count(), 9);
    }

    #[test]
    fn chain_simnet_encodes_the_four_way_distribution() {
        let reconstructed = crate::simnet::reconstruct_joint(&chain_simnet()).unwrap();
        let mixture = four_way_multinet()
            .union_network()
            .unwrap()
            .network
            .enumerate_joint()
            .unwrap();
        assert!(reconstructed.max_abs_difference(&mixture).unwrap() < 1e-9);
    }

    #[test]
    fn spy_visitor_edge_prunes_the_conversing_clue() {
        let s = paired_simnet();
        assert!(!s.locals()[0].depicts("c"));
        assert!(s.locals()[1].depicts("c"));
    }
}
