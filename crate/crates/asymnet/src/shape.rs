//! Row-major indexing over Cartesian domains (last axis fastest).

pub(crate) fn size(cards: &[usize]) -> usize {
    cards.iter().product()
}

/// Decode a flat index into per-axis indices.
pub(crate) fn unravel(mut flat: usize, cards: &[usize], out: &mut [usize]) {
    for i in (0..cards.len()).rev() {
        out[i] = flat % cards[i];
        flat /= cards[i];
    }
}

/// Encode per-axis indices into a flat index.
pub(crate) fn ravel(indices: &[usize], cards: &[usize]) -> usize {
    let mut flat = 0;
    for (i, &idx) in indices.iter().enumerate() {
        debug_assert!(idx < cards[i]);
        flat = flat * cards[i] + idx;
    }
    flat
}

/// Iterate every index tuple of the domain in row-major order.
pub(crate) fn configurations(cards: &[usize]) -> impl Iterator<Item = Vec<usize>> + '_ {
    let total = size(cards);
    (0..total).map(move |flat| {
        let mut idx = vec![0; cards.len()];
        unravel(flat, cards, &mut idx);
        idx
    })
}
