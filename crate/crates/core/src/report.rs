//! Verdicts with margins and witnesses, shared by every certifier.

use serde::{Deserialize, Serialize};

use crate::index_set::IndexSet;
use crate::io::ext_f64;
use crate::tolerance::Tolerances;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Pass,
    Fail,
    Undefined,
}

impl Verdict {
    pub fn passed(self) -> bool {
        self == Verdict::Pass
    }

    pub fn from_bool(ok: bool) -> Self {
        if ok {
            Verdict::Pass
        } else {
            Verdict::Fail
        }
    }
}

/// Locates the condition that binds (on pass) or is violated (on fail).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Witness {
    /// A principal minor or principal submatrix.
    Subset { set: IndexSet },
    /// A pair of equal-size sets with its dispersal.
    Pair {
        alpha: IndexSet,
        beta: IndexSet,
        d: usize,
    },
    /// Two incomparable sets in an inequality over unions and intersections.
    SetPair { alpha: IndexSet, beta: IndexSet },
    Eigenvalue { re: f64, im: f64 },
    /// `smaller ⊂ larger`, with `l(larger) > l(smaller)` on failure.
    Chain { larger: IndexSet, smaller: IndexSet },
    /// Position `j` in a sequence.
    Index { j: usize },
    /// Matrix entry, one-based.
    Entry { row: usize, col: usize },
}

/// Outcome of one certifier.
///
/// `margin` is the raw slack of the binding condition. Verdicts are decided
/// against a zero band of `tol_zero` times the condition's scale, so a pass
/// can carry a margin slightly below zero and a fail one slightly above; such
/// verdicts always have `marginal` set.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClassReport {
    pub verdict: Verdict,
    #[serde(with = "ext_f64")]
    pub margin: f64,
    pub witness: Option<Witness>,
    pub checked_count: usize,
    pub marginal: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

impl ClassReport {
    pub fn passed(&self) -> bool {
        self.verdict.passed()
    }

    /// A report with nothing to check.
    pub fn vacuous() -> Self {
        ClassReport {
            verdict: Verdict::Pass,
            margin: f64::INFINITY,
            witness: None,
            checked_count: 0,
            marginal: false,
            note: None,
        }
    }

    pub fn undefined(note: impl Into<String>) -> Self {
        ClassReport {
            verdict: Verdict::Undefined,
            margin: f64::NAN,
            witness: None,
            checked_count: 0,
            marginal: false,
            note: Some(note.into()),
        }
    }

    pub(crate) fn with_note(mut self, note: impl Into<String>) -> Self {
        self.note = Some(note.into());
        self
    }

    /// Conjunction of two reports: the failing or tighter one wins.
    pub fn and(self, other: ClassReport) -> ClassReport {
        let count = self.checked_count + other.checked_count;
        let rank = |r: &ClassReport| match r.verdict {
            Verdict::Fail => 0,
            Verdict::Undefined => 1,
            Verdict::Pass => 2,
        };
        let mut pick = match rank(&self).cmp(&rank(&other)) {
            std::cmp::Ordering::Less => self,
            std::cmp::Ordering::Greater => other,
            std::cmp::Ordering::Equal => {
                if other.margin < self.margin {
                    other
                } else {
                    self
                }
            }
        };
        pick.checked_count = count;
        pick
    }
}

/// Whether the certifier requires its slacks to be nonnegative or positive.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum Strictness {
    NonNegative,
    Positive,
}

/// Running minimum of `slack / scale` over the checked conditions.
pub(crate) struct Tightest<W> {
    best: Option<(f64, f64, W)>,
    count: usize,
}

impl<W> Tightest<W> {
    pub(crate) fn new() -> Self {
        Tightest {
            best: None,
            count: 0,
        }
    }

    pub(crate) fn offer(&mut self, slack: f64, scale: f64, witness: impl FnOnce() -> W) {
        self.count += 1;
        let norm = slack / scale;
        let better = match &self.best {
            None => true,
            Some((s, c, _)) => norm < s / c || (norm.is_nan() && !(s / c).is_nan()),
        };
        if better {
            self.best = Some((slack, scale, witness()));
        }
    }

    pub(crate) fn finish(self, tol: &Tolerances, mode: Strictness) -> ClassReport
    where
        W: Into<Witness>,
    {
        let Some((slack, scale, w)) = self.best else {
            return ClassReport::vacuous();
        };
        let ok = match mode {
            Strictness::NonNegative => tol.nonnegative(slack, scale),
            Strictness::Positive => tol.positive(slack, scale),
        } && !slack.is_nan();
        ClassReport {
            verdict: Verdict::from_bool(ok),
            margin: slack,
            witness: Some(w.into()),
            checked_count: self.count,
            marginal: tol.marginal(slack, scale),
            note: None,
        }
    }
}

impl From<IndexSet> for Witness {
    fn from(set: IndexSet) -> Self {
        Witness::Subset { set }
    }
}

impl From<crate::index_set::DispersalPair> for Witness {
    fn from(p: crate::index_set::DispersalPair) -> Self {
        Witness::Pair {
            alpha: p.alpha,
            beta: p.beta,
            d: p.d,
        }
    }
}

impl From<num_complex::Complex64> for Witness {
    fn from(z: num_complex::Complex64) -> Self {
        Witness::Eigenvalue { re: z.re, im: z.im }
    }
}
