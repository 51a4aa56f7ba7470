//! Recovery of the global hypothesis priors from within-edge conditionals.
//!
//! Each cover edge constrains the priors by p(h) = p(h | A) · Σ_{h' ∈ A} p(h'),
//! so the prior *ratios* inside an edge equal the conditional ratios. A
//! connected cover chains those ratios across the whole domain; together with
//! Σ p(h) = 1 they pin the priors uniquely, provided no conditional is zero.

use crate::error::{Error, Result};
use crate::factor::Factor;
use crate::multinet::in_block_conditional;

use super::{SimilarityNetwork, COHERENCE_TOLERANCE};

/// Recover the unique prior over `domain(H)` consistent with every edge's
/// within-edge conditional: ratio propagation over the similarity hypergraph,
/// normalization, then verification of every edge equation.
///
/// Fails with a zero-prior error when any within-edge conditional is zero
/// (the ratios become ill-defined), and with an incoherent-simnet error when
/// the elicited conditionals contradict each other beyond tolerance.
pub fn recover_priors(s: &SimilarityNetwork) -> Result<Factor> {
    let space = s.space();
    let domain = space.domain_size();
    if !s.cover().covers_domain() {
        return Err(Error::contract(
            "priors are recoverable only when the cover reaches every hypothesis point",
        ));
    }

    // Within-edge conditionals, checked strictly positive on their own edges.
    let mut conditionals = Vec::with_capacity(s.locals().len());
    for (i, local) in s.locals().iter().enumerate() {
        let q = in_block_conditional(local.network(), space)?;
        for &p in s.cover().edge(i) {
            if q[p] <= 0.0 {
                let label = space.label(&space.point_at(p).unwrap());
                return Err(Error::ZeroPrior(format!(
                    "within-edge conditional of {label} is zero in local network {i}"
                )));
            }
        }
        conditionals.push(q);
    }

    // Ratio propagation: scale every point's score off an already-scored
    // anchor in the same edge; the spanning structure of a connected cover
    // reaches everything.
    let mut score: Vec<Option<f64>> = vec![None; domain];
    score[0] = Some(1.0);
    loop {
        let mut progressed = false;
        for (i, edge) in (0..s.cover().edge_count()).map(|i| (i, s.cover().edge(i))) {
            let Some(&anchor) = edge.iter().find(|&&p| score[p].is_some()) else {
                continue;
            };
            let anchor_score = score[anchor].unwrap();
            for &p in edge {
                if score[p].is_none() {
                    score[p] =
                        Some(anchor_score * conditionals[i][p] / conditionals[i][anchor]);
                    progressed = true;
                }
            }
        }
        if !progressed {
            break;
        }
    }
    let scores: Vec<f64> = score
        .into_iter()
        .map(|v| {
            v.ok_or_else(|| {
                Error::contract("priors are recoverable only for a connected cover")
            })
        })
        .collect::<Result<_>>()?;
    let total: f64 = scores.iter().sum();
    let priors: Vec<f64> = scores.iter().map(|v| v / total).collect();

    // Verify every edge equation, including the ones ratio propagation never
    // used: residuals beyond tolerance mean the elicited conditionals are
    // mutually contradictory.
    for (i, edge) in (0..s.cover().edge_count()).map(|i| (i, s.cover().edge(i))) {
        let edge_mass: f64 = edge.iter().map(|&p| priors[p]).sum();
        for &p in edge {
            let residual = (priors[p] - conditionals[i][p] * edge_mass).abs();
            if residual > COHERENCE_TOLERANCE {
                let label = space.label(&space.point_at(p).unwrap());
                return Err(Error::IncoherentSimnet(format!(
                    "edge {i} equation for {label} has residual {residual:.3e}"
                )));
            }
        }
    }

    Factor::new(space.var_ids(), space.cards(), priors)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::hypothesis::{HypothesisPoint, HypothesisSpace};
    use crate::network::DiscreteNetwork;
    use crate::variable::Variable;

    use super::super::{Cover, OrdinaryLocalNetwork};

    /// A chain-cover similarity network over four hypotheses where each
    /// two-point local network encodes only the within-edge conditional.
    fn chain_cover_simnet(conditionals: [[f64; 4]; 3]) -> SimilarityNetwork {
        let space = HypothesisSpace::new(vec![Variable::new(
            "h",
            ["h1", "h2", "h3", "h4"],
        )
        .unwrap()])
        .unwrap();
        let mk = |row: [f64; 4]| -> OrdinaryLocalNetwork {
            OrdinaryLocalNetwork::new(
                DiscreteNetwork::builder()
                    .variable("h", ["h1", "h2", "h3", "h4"])
                    .cpt("h", [] as [&str; 0], [row.to_vec()])
                    .build()
                    .unwrap(),
            )
        };
        let edge = |a: usize, b: usize| -> Vec<HypothesisPoint> {
            vec![HypothesisPoint(vec![a]), HypothesisPoint(vec![b])]
        };
        let cover = Cover::new(space, vec![edge(0, 1), edge(1, 2), edge(2, 3)]).unwrap();
        SimilarityNetwork::new(
            cover,
            vec![mk(conditionals[0]), mk(conditionals[1]), mk(conditionals[2])],
        )
        .unwrap()
    }

    /// Gaussian elimination with partial pivoting; the independent dense
    /// oracle the ratio-propagation result is checked against.
    fn solve_dense(mut a: Vec<Vec<f64>>, mut b: Vec<f64>) -> Vec<f64> {
        let n = b.len();
        for col in 0..n {
            let pivot = (col..n)
                .max_by(|&i, &j| a[i][col].abs().partial_cmp(&a[j][col].abs()).unwrap())
                .unwrap();
            a.swap(col, pivot);
            b.swap(col, pivot);
            for row in col + 1..n {
                let factor = a[row][col] / a[col][col];
                for k in col..n {
                    a[row][k] -= factor * a[col][k];
                }
                b[row] -= factor * b[col];
            }
        }
        let mut x = vec![0.0; n];
        for row in (0..n).rev() {
            let mut acc = b[row];
            for k in row + 1..n {
                acc -= a[row][k] * x[k];
            }
            x[row] = acc / a[row][row];
        }
        x
    }

    #[test]
    fn uniform_chain_recovers_exact_quarters() {
        let s = chain_cover_simnet([
            [0.5, 0.5, 0.0, 0.0],
            [0.0, 0.5, 0.5, 0.0],
            [0.0, 0.0, 0.5, 0.5],
        ]);
        let priors = recover_priors(&s).unwrap();
        assert_eq!(priors.values(), &[0.25, 0.25, 0.25, 0.25]);
    }

    #[test]
    fn skewed_chain_matches_the_dense_solver() {
        // p(h1 | {h1,h2}) = 1/3, p(h2 | {h2,h3}) = 1/2, p(h3 | {h3,h4}) = 1/2.
        let third = 1.0 / 3.0;
        let s = chain_cover_simnet([
            [third, 2.0 * third, 0.0, 0.0],
            [0.0, 0.5, 0.5, 0.0],
            [0.0, 0.0, 0.5, 0.5],
        ]);
        let priors = recover_priors(&s).unwrap();

        // Independent route: three edge equations p_i = q_i (p_i + p_j) plus
        // normalization, solved densely.
        let q = [third, 0.5, 0.5];
        let mut a = vec![vec![0.0; 4]; 4];
        let mut b = vec![0.0; 4];
        for (i, &qi) in q.iter().enumerate() {
            a[i][i] = 1.0 - qi;
            a[i][i + 1] = -qi;
        }
        a[3] = vec![1.0; 4];
        b[3] = 1.0;
        let expected = solve_dense(a, b);

        for (got, want) in priors.values().iter().zip(&expected) {
            assert!((got - want).abs() < 1e-12, "{got} vs {want}");
        }
        let sevenths = [1.0 / 7.0, 2.0 / 7.0, 2.0 / 7.0, 2.0 / 7.0];
        for (got, want) in priors.values().iter().zip(&sevenths) {
            assert!((got - want).abs() < 1e-12);
        }
    }

    #[test]
    fn zero_conditional_raises_zero_prior() {
        let s = chain_cover_simnet([
            [1.0, 0.0, 0.0, 0.0],
            [0.0, 0.5, 0.5, 0.0],
            [0.0, 0.0, 0.5, 0.5],
        ]);
        assert!(matches!(recover_priors(&s), Err(Error::ZeroPrior(_))));
    }

    #[test]
    fn contradictory_duplicates_raise_incoherence() {
        // A cycle cover whose ratios multiply to something other than 1.
        let space = HypothesisSpace::new(vec![Variable::new("h", ["a", "b", "c"]).unwrap()])
            .unwrap();
        let mk = |row: [f64; 3]| {
            OrdinaryLocalNetwork::new(
                DiscreteNetwork::builder()
                    .variable("h", ["a", "b", "c"])
                    .cpt("h", [] as [&str; 0], [row.to_vec()])
                    .build()
                    .unwrap(),
            )
        };
        let e = |a: usize, b: usize| vec![HypothesisPoint(vec![a]), HypothesisPoint(vec![b])];
        let cover = Cover::new(space, vec![e(0, 1), e(1, 2), e(2, 0)]).unwrap();
        let s = SimilarityNetwork::new(
            cover,
            vec![
                mk([0.5, 0.5, 0.0]),  // a:b = 1:1
                mk([0.0, 0.5, 0.5]),  // b:c = 1:1
                mk([0.25, 0.0, 0.75]), // c:a = 3:1, contradicting the others
            ],
        )
        .unwrap();
        assert!(matches!(
            recover_priors(&s),
            Err(Error::IncoherentSimnet(_))
        ));
    }

    #[test]
    fn chain_simnet_priors_match_the_multinet() {
        let priors = recover_priors(&fixtures::chain_simnet()).unwrap();
        let expected = fixtures::four_way_multinet();
        for (got, want) in priors.values().iter().zip(expected.point_priors()) {
            assert!((got - want).abs() < 1e-9, "{got} vs {want}");
        }
    }
}
