//! Arc reversal: the joint-preserving transformation that flips one arc and
//! rewrites both endpoints' CPTs by Bayes' rule.

use crate::error::{Error, Result, Warning};
use crate::network::DiscreteNetwork;
use crate::shape;
use crate::table::Cpt;
use crate::variable::VarId;

/// A reversed network plus any uniform-fill warnings (see [`reverse_arc`]).
#[derive(Debug, Clone)]
pub struct Reversal {
    pub network: DiscreteNetwork,
    pub warnings: Vec<Warning>,
}

/// Reverse the arc `x -> y`.
///
/// Both endpoints inherit the other's former parents, and the two CPTs are
/// rewritten so the joint distribution is unchanged. When the reversed
/// conditional is undefined because a parent configuration has probability
/// zero, the affected row is set uniform — any choice preserves the joint —
/// and a warning records it.
///
/// Fails when the arc does not exist or when another directed path from `x`
/// to `y` would make the reversal cyclic.
pub fn reverse_arc(net: &DiscreteNetwork, x: &VarId, y: &VarId) -> Result<Reversal> {
    let Some(xp) = net.position(x.as_str()) else {
        return Err(Error::contract(format!("unknown variable {x}")));
    };
    let Some(yp) = net.position(y.as_str()) else {
        return Err(Error::contract(format!("unknown variable {y}")));
    };
    if !net.parent_positions(yp).contains(&xp) {
        return Err(Error::contract(format!("no arc {x} -> {y} to reverse")));
    }
    if net.directed_path_exists(xp, yp, Some((xp, yp))) {
        return Err(Error::ReversalWouldCycle {
            from: x.clone(),
            to: y.clone(),
        });
    }

    // Shared context: the union of both parent sets minus x itself, in
    // ascending id order (the canonical order for rewritten CPTs).
    let mut context: Vec<usize> = net
        .parent_positions(xp)
        .iter()
        .chain(net.parent_positions(yp))
        .copied()
        .filter(|&p| p != xp)
        .collect();
    context.sort_by(|a, b| net.variable_at(*a).id().cmp(net.variable_at(*b).id()));
    context.dedup();

    let context_cards: Vec<usize> = context
        .iter()
        .map(|&p| net.variable_at(p).cardinality())
        .collect();
    let x_card = net.variable_at(xp).cardinality();
    let y_card = net.variable_at(yp).cardinality();

    let x_parent_positions = net.parent_positions(xp).to_vec();
    let y_parent_positions = net.parent_positions(yp).to_vec();
    let x_cpt = net.cpt_at(xp);
    let y_cpt = net.cpt_at(yp);

    let pick = |positions: &[usize], ctx: &[usize], x_val: Option<usize>| -> Vec<usize> {
        positions
            .iter()
            .map(|&p| {
                if p == xp {
                    x_val.expect("x appears only in y's parents")
                } else {
                    let k = context.iter().position(|&c| c == p).unwrap();
                    ctx[k]
                }
            })
            .collect()
    };
    let cards_of = |positions: &[usize]| -> Vec<usize> {
        positions
            .iter()
            .map(|&p| net.variable_at(p).cardinality())
            .collect()
    };
    let x_parent_cards = cards_of(&x_parent_positions);
    let y_parent_cards = cards_of(&y_parent_positions);

    let mut warnings = Vec::new();
    let mut new_y_rows: Vec<Vec<f64>> = Vec::new();
    let mut new_x_rows: Vec<Vec<f64>> = Vec::new();
    // New x parent order: context (ascending id) with y spliced in by id.
    let mut x_new_parents: Vec<usize> = context.clone();
    x_new_parents.push(yp);
    x_new_parents.sort_by(|a, b| net.variable_at(*a).id().cmp(net.variable_at(*b).id()));
    let y_slot = x_new_parents.iter().position(|&p| p == yp).unwrap();

    for ctx in shape::configurations(&context_cards) {
        // P'(y | ctx) = sum_x P(x | pa_x) P(y | x, pa_y)
        let x_row = x_cpt.entry_row(&pick(&x_parent_positions, &ctx, None), &x_parent_cards);
        let mut y_row = vec![0.0; y_card];
        let mut joint = vec![vec![0.0; y_card]; x_card];
        for xv in 0..x_card {
            let y_given = y_cpt.entry_row(
                &pick(&y_parent_positions, &ctx, Some(xv)),
                &y_parent_cards,
            );
            for yv in 0..y_card {
                let p = x_row[xv] * y_given[yv];
                joint[xv][yv] = p;
                y_row[yv] += p;
            }
        }
        new_y_rows.push(y_row.clone());
        // P'(x | ctx, y) = joint / P'(y | ctx); context rows are emitted in
        // row-major order over (ctx, y) with y in its id-sorted slot.
        for yv in 0..y_card {
            if y_row[yv] == 0.0 {
                let ctx_label: Vec<String> = ctx.iter().map(|i| i.to_string()).collect();
                warnings.push(Warning::new(format!(
                    "reversal of {x} -> {y}: context ({}) with {y}={yv} has probability zero; \
                     row for {x} set uniform",
                    ctx_label.join(",")
                )));
                new_x_rows.push(vec![1.0 / x_card as f64; x_card]);
            } else {
                new_x_rows.push((0..x_card).map(|xv| joint[xv][yv] / y_row[yv]).collect());
            }
        }
    }

    // The x rows above were generated with y fastest; reorder them into the
    // row-major order of the id-sorted parent list.
    let mut gen_cards = context_cards.clone();
    gen_cards.push(y_card);
    let sorted_cards: Vec<usize> = x_new_parents
        .iter()
        .map(|&p| net.variable_at(p).cardinality())
        .collect();
    let mut x_rows_sorted = vec![Vec::new(); new_x_rows.len()];
    for (flat, row) in new_x_rows.into_iter().enumerate() {
        let mut gen_idx = vec![0usize; gen_cards.len()];
        shape::unravel(flat, &gen_cards, &mut gen_idx);
        // gen order: context..., y. Map into the sorted parent order.
        let mut sorted_idx = vec![0usize; gen_idx.len()];
        for (slot, &p) in x_new_parents.iter().enumerate() {
            if slot == y_slot {
                sorted_idx[slot] = gen_idx[gen_cards.len() - 1];
            } else {
                let k = context.iter().position(|&c| c == p).unwrap();
                sorted_idx[slot] = gen_idx[k];
            }
        }
        x_rows_sorted[shape::ravel(&sorted_idx, &sorted_cards)] = row;
    }

    let to_ids = |positions: &[usize]| -> Vec<VarId> {
        positions
            .iter()
            .map(|&p| net.variable_at(p).id().clone())
            .collect()
    };
    let new_y_cpt = Cpt::new(y.clone(), to_ids(&context), new_y_rows)?;
    let new_x_cpt = Cpt::new(x.clone(), to_ids(&x_new_parents), x_rows_sorted)?;

    let network = net.with_cpt(new_y_cpt)?.with_cpt(new_x_cpt)?;
    Ok(Reversal { network, warnings })
}

/// Reverse parent arcs into `h` until it is a root, preserving the joint.
///
/// The sequence is deterministic: at each step the parent arc whose source is
/// latest in the topological order is reversed — that arc never has an
/// alternative directed path, so each step is legal.
pub fn repeated_reversal_to_root(net: &DiscreteNetwork, h: &VarId) -> Result<Reversal> {
    if !net.contains(h.as_str()) {
        return Err(Error::contract(format!("unknown variable {h}")));
    }
    let mut current = net.clone();
    let mut warnings = Vec::new();
    loop {
        let parents = current.parents(h.as_str());
        if parents.is_empty() {
            return Ok(Reversal {
                network: current,
                warnings,
            });
        }
        let order = current.topological_order()?;
        let latest = parents
            .iter()
            .max_by_key(|p| order.iter().position(|o| &o == p).unwrap())
            .unwrap()
            .clone();
        let step = reverse_arc(&current, &latest, h)?;
        current = step.network;
        warnings.extend(step.warnings);
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::assignment::Assignment;

    fn copy_chain() -> DiscreteNetwork {
        DiscreteNetwork::builder()
            .variable("a", ["0", "1"])
            .variable("b", ["0", "1"])
            .cpt("a", [] as [&str; 0], [[0.5, 0.5]])
            .cpt("b", ["a"], [[1.0, 0.0], [0.0, 1.0]])
            .build()
            .unwrap()
    }

    #[test]
    fn symmetric_deterministic_reversal() {
        let net = copy_chain();
        let reversed = reverse_arc(&net, &"a".into(), &"b".into()).unwrap();
        assert!(reversed.warnings.is_empty());
        let r = reversed.network;
        assert_eq!(r.parents("a"), vec![VarId::from("b")]);
        assert!(r.parents("b").is_empty());
        assert_eq!(r.cpt("b").unwrap().rows(), &[vec![0.5, 0.5]]);
        assert_eq!(
            r.cpt("a").unwrap().rows(),
            &[vec![1.0, 0.0], vec![0.0, 1.0]]
        );
    }

    #[test]
    fn reversal_preserves_joint() {
        let net = copy_chain();
        let reversed = reverse_arc(&net, &"a".into(), &"b".into()).unwrap();
        let before = net.enumerate_joint().unwrap();
        let after = reversed.network.enumerate_joint().unwrap();
        assert!(before.max_abs_difference(&after).unwrap() < 1e-12);
    }

    #[test]
    fn alternative_path_blocks_reversal() {
        // a -> b, a -> c, c -> b: reversing (a, b) must fail because of the
        // directed path a -> c -> b.
        let net = DiscreteNetwork::builder()
            .variable("a", ["0", "1"])
            .variable("b", ["0", "1"])
            .variable("c", ["0", "1"])
            .cpt("a", [] as [&str; 0], [[0.5, 0.5]])
            .cpt("c", ["a"], [[0.25, 0.75], [0.75, 0.25]])
            .cpt("b", ["a", "c"], vec![vec![0.5, 0.5]; 4])
            .build()
            .unwrap();
        assert!(matches!(
            reverse_arc(&net, &"a".into(), &"b".into()),
            Err(Error::ReversalWouldCycle { .. })
        ));
    }

    #[test]
    fn missing_arc_is_a_contract_error() {
        let net = copy_chain();
        assert!(matches!(
            reverse_arc(&net, &"b".into(), &"a".into()),
            Err(Error::Contract(_))
        ));
    }

    #[test]
    fn root_is_returned_unchanged() {
        let net = copy_chain();
        let out = repeated_reversal_to_root(&net, &"a".into()).unwrap();
        assert_eq!(out.network, net);
    }

    #[test]
    fn single_parent_becomes_root() {
        let net = copy_chain();
        let out = repeated_reversal_to_root(&net, &"b".into()).unwrap();
        assert!(out.network.parents("b").is_empty());
        let before = net.enumerate_joint().unwrap();
        let after = out.network.enumerate_joint().unwrap();
        assert!(before.max_abs_difference(&after).unwrap() < 1e-12);
    }

    #[test]
    fn zero_probability_context_warns_and_fills_uniform() {
        let net = DiscreteNetwork::builder()
            .variable("a", ["0", "1"])
            .variable("b", ["0", "1"])
            .cpt("a", [] as [&str; 0], [[1.0, 0.0]])
            .cpt("b", ["a"], [[1.0, 0.0], [0.0, 1.0]])
            .build()
            .unwrap();
        let reversed = reverse_arc(&net, &"a".into(), &"b".into()).unwrap();
        assert_eq!(reversed.warnings.len(), 1);
        // P'(b) = (1, 0); the b=1 row of a's new table is uniform.
        assert_eq!(
            reversed.network.cpt("a").unwrap().rows(),
            &[vec![1.0, 0.0], vec![0.5, 0.5]]
        );
        let before = net.enumerate_joint().unwrap();
        let after = reversed.network.enumerate_joint().unwrap();
        assert!(before.max_abs_difference(&after).unwrap() < 1e-12);
    }
}
