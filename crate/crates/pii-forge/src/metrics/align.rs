//! Edit-distance alignment with deterministic traceback.

/// One aligned edit operation.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OpKind {
    Match,
    Substitute,
    Delete,
    Insert,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct AlignOp {
    pub kind: OpKind,
    pub ref_index: Option<usize>,
    pub hyp_index: Option<usize>,
}

/// A full alignment between a reference and a hypothesis token sequence.
///
/// `cost` is the Levenshtein distance under unit insert/delete/substitute
/// costs, and equals the number of non-`Match` operations.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Alignment {
    pub ops: Vec<AlignOp>,
    pub cost: usize,
}

impl Alignment {
    /// Reference indices that participate in a `Match`.
    pub fn matched_ref_indices(&self) -> impl Iterator<Item = usize> + '_ {
        self.ops.iter().filter_map(|op| match op.kind {
            OpKind::Match => op.ref_index,
            _ => None,
        })
    }
}

/// Align two token sequences by minimal edit distance.
///
/// When several tracebacks share the optimal cost, ties break in the fixed
/// order Match > Substitute > Delete > Insert, so repeated runs produce
/// identical op lists.
pub fn align<T: PartialEq>(reference: &[T], hypothesis: &[T]) -> Alignment {
    let n = reference.len();
    let m = hypothesis.len();
    let width = m + 1;
    let mut dp = vec![0u32; (n + 1) * width];
    for i in 0..=n {
        dp[i * width] = i as u32;
    }
    for (j, cell) in dp.iter_mut().enumerate().take(width) {
        *cell = j as u32;
    }
    for i in 1..=n {
        for j in 1..=m {
            let sub_cost = u32::from(reference[i - 1] != hypothesis[j - 1]);
            let diagonal = dp[(i - 1) * width + (j - 1)] + sub_cost;
            let delete = dp[(i - 1) * width + j] + 1;
            let insert = dp[i * width + (j - 1)] + 1;
            dp[i * width + j] = diagonal.min(delete).min(insert);
        }
    }

    let mut ops = Vec::with_capacity(n.max(m));
    let (mut i, mut j) = (n, m);
    while i > 0 || j > 0 {
        let here = dp[i * width + j];
        if i > 0 && j > 0 {
            let equal = reference[i - 1] == hypothesis[j - 1];
            let diagonal = dp[(i - 1) * width + (j - 1)];
            if equal && diagonal == here {
                ops.push(AlignOp {
                    kind: OpKind::Match,
                    ref_index: Some(i - 1),
                    hyp_index: Some(j - 1),
                });
                i -= 1;
                j -= 1;
                continue;
            }
            if !equal && diagonal + 1 == here {
                ops.push(AlignOp {
                    kind: OpKind::Substitute,
                    ref_index: Some(i - 1),
                    hyp_index: Some(j - 1),
                });
                i -= 1;
                j -= 1;
                continue;
            }
        }
        if i > 0 && dp[(i - 1) * width + j] + 1 == here {
            ops.push(AlignOp {
                kind: OpKind::Delete,
                ref_index: Some(i - 1),
                hyp_index: None,
            });
            i -= 1;
            continue;
        }
        ops.push(AlignOp {
            kind: OpKind::Insert,
            ref_index: None,
            hyp_index: Some(j - 1),
        });
        j -= 1;
    }
    ops.reverse();

    let cost = dp[n * width + m] as usize;
    debug_assert_eq!(
        cost,
        ops.iter().filter(|op| op.kind != OpKind::Match).count()
    );
    Alignment { ops, cost }
}

/// Edit distance alone, in O(min(n, m)) memory.
pub fn edit_distance<T: PartialEq>(reference: &[T], hypothesis: &[T]) -> usize {
    let (short, long) = if reference.len() <= hypothesis.len() {
        (reference, hypothesis)
    } else {
        (hypothesis, reference)
    };
    let mut row: Vec<u32> = (0..=short.len() as u32).collect();
    for (i, long_item) in long.iter().enumerate() {
        let mut prev_diag = row[0];
        row[0] = i as u32 + 1;
        for (j, short_item) in short.iter().enumerate() {
            let sub = prev_diag + u32::from(long_item != short_item);
            prev_diag = row[j + 1];
            row[j + 1] = sub.min(prev_diag + 1).min(row[j] + 1);
        }
    }
    row[short.len()] as usize
}
