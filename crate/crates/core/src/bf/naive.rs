//! Literal tuple-level evaluation of the equivalence levels.
//!
//! No normalization to partial maps: tuples keep their repetitions and the
//! challenge points range over the whole space, exactly as in the
//! definition. Used to cross-check the reduction to partial maps.

use std::collections::HashMap;

use crate::partial_map::TuplePair;
use crate::space::MetricSpace;
use crate::{Error, Limits};

/// Memoizing evaluator for one space. The memo is shared across queries.
pub struct NaiveEvaluator<'a> {
    space: &'a MetricSpace,
    limits: Limits,
    memo: HashMap<(Vec<usize>, Vec<usize>, u32), bool>,
}

impl<'a> NaiveEvaluator<'a> {
    pub fn new(space: &'a MetricSpace, limits: Limits) -> NaiveEvaluator<'a> {
        NaiveEvaluator {
            space,
            limits,
            memo: HashMap::new(),
        }
    }

    /// `a ≡_alpha b`, computed from the definition.
    pub fn equiv(&mut self, tp: &TuplePair, alpha: u32) -> Result<bool, Error> {
        tp.check_bounds(self.space.n())?;
        if tp.len() > self.limits.naive_max_len {
            return Err(Error::LimitExceeded(format!(
                "tuple length {} exceeds {}",
                tp.len(),
                self.limits.naive_max_len
            )));
        }
        if alpha > self.limits.naive_max_alpha {
            return Err(Error::LimitExceeded(format!(
                "level {alpha} exceeds {}",
                self.limits.naive_max_alpha
            )));
        }
        let mut a = tp.a().to_vec();
        let mut b = tp.b().to_vec();
        Ok(self.eval(&mut a, &mut b, alpha))
    }

    /// Some partial isomorphism sends `a` onto `b`: every pairwise distance
    /// agrees, including the zero distances of repeated entries.
    fn level_zero(&self, a: &[usize], b: &[usize]) -> bool {
        let s = self.space;
        (0..a.len()).all(|i| (i + 1..a.len()).all(|j| s.class(a[i], a[j]) == s.class(b[i], b[j])))
    }

    fn eval(&mut self, a: &mut Vec<usize>, b: &mut Vec<usize>, alpha: u32) -> bool {
        // Every level refines level 0, so a pair failing it fails them all.
        if !self.level_zero(a, b) {
            return false;
        }
        if alpha == 0 {
            return true;
        }
        let key = (a.clone(), b.clone(), alpha);
        if let Some(&v) = self.memo.get(&key) {
            return v;
        }
        let n = self.space.n();
        let mut holds = true;
        // for every x_a there is y_b with a x_a ≡_(alpha-1) b y_b, and for
        // every x_b there is y_a with a y_a ≡_(alpha-1) b x_b
        'outer: for forth in [true, false] {
            for x in 0..n {
                let mut found = false;
                for y in 0..n {
                    let (pa, pb) = if forth { (x, y) } else { (y, x) };
                    a.push(pa);
                    b.push(pb);
                    let ok = self.eval(a, b, alpha - 1);
                    a.pop();
                    b.pop();
                    if ok {
                        found = true;
                        break;
                    }
                }
                if !found {
                    holds = false;
                    break 'outer;
                }
            }
        }
        self.memo.insert(key, holds);
        holds
    }
}

/// One-shot literal evaluation of `tp ∈ ≡_alpha` with default limits.
pub fn rank_of_pair_naive(space: &MetricSpace, tp: &TuplePair, alpha: u32) -> Result<bool, Error> {
    NaiveEvaluator::new(space, Limits::default()).equiv(tp, alpha)
}
