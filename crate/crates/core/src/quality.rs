//! Rule quality measures over a confusion matrix, the one-sided Fisher exact
//! test and Benjamini-Hochberg adjustment.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use statrs::function::factorial::ln_factorial;

use crate::error::Error;

/// Covered positives `p`, covered negatives `n`, and class totals `P`, `N`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ConfusionMatrix {
    pub p: u64,
    pub n: u64,
    #[serde(rename = "P")]
    pub pos: u64,
    #[serde(rename = "N")]
    pub neg: u64,
}

impl ConfusionMatrix {
    pub fn new(p: u64, n: u64, pos: u64, neg: u64) -> Self {
        debug_assert!(p <= pos && n <= neg, "covered counts exceed totals");
        ConfusionMatrix { p, n, pos, neg }
    }

    pub fn covered(&self) -> u64 {
        self.p + self.n
    }

    pub fn total(&self) -> u64 {
        self.pos + self.neg
    }

    pub fn precision(&self) -> f64 {
        if self.covered() == 0 {
            0.0
        } else {
            self.p as f64 / self.covered() as f64
        }
    }

    /// Sensitivity `p / P`.
    pub fn coverage(&self) -> f64 {
        if self.pos == 0 {
            0.0
        } else {
            self.p as f64 / self.pos as f64
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Measure {
    Precision,
    WLap,
    C2,
    Gain,
    Correlation,
    Rss,
    Lift,
}

impl Measure {
    pub const ALL: [Measure; 7] = [
        Measure::Precision,
        Measure::WLap,
        Measure::C2,
        Measure::Gain,
        Measure::Correlation,
        Measure::Rss,
        Measure::Lift,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Measure::Precision => "precision",
            Measure::WLap => "wlap",
            Measure::C2 => "c2",
            Measure::Gain => "gain",
            Measure::Correlation => "corr",
            Measure::Rss => "rss",
            Measure::Lift => "lift",
        }
    }

    /// Higher is better for every measure. A matrix covering nothing scores 0
    /// (wLap keeps its closed form, which is defined there).
    pub fn evaluate(self, cm: &ConfusionMatrix) -> f64 {
        let p = cm.p as f64;
        let n = cm.n as f64;
        let pos = cm.pos as f64;
        let neg = cm.neg as f64;
        let covered = p + n;
        match self {
            Measure::WLap => (p + 1.0) * (pos + neg) / ((covered + 2.0) * pos),
            _ if covered == 0.0 => 0.0,
            Measure::Precision => p / covered,
            Measure::C2 => ((neg * p - pos * n) / (neg * covered)) * ((pos + p) / (2.0 * pos)),
            Measure::Rss => p / pos - n / neg,
            Measure::Lift => (p / covered) * ((pos + neg) / pos),
            Measure::Correlation => {
                let denom = (pos * neg * covered * (pos + neg - covered)).sqrt();
                if denom == 0.0 {
                    0.0
                } else {
                    (p * neg - n * pos) / denom
                }
            }
            Measure::Gain => information_gain(cm),
        }
    }
}

fn entropy2(a: f64, b: f64) -> f64 {
    let t = a + b;
    if t == 0.0 {
        return 0.0;
    }
    [a, b]
        .iter()
        .filter(|&&x| x > 0.0)
        .map(|&x| {
            let q = x / t;
            -q * q.log2()
        })
        .sum()
}

/// `H(Y) - H(Y|X)`, with X = covered/uncovered and Y = positive/negative.
fn information_gain(cm: &ConfusionMatrix) -> f64 {
    let p = cm.p as f64;
    let n = cm.n as f64;
    let total = cm.total() as f64;
    let covered = p + n;
    let rest_pos = cm.pos as f64 - p;
    let rest_neg = cm.neg as f64 - n;
    let h_y = entropy2(cm.pos as f64, cm.neg as f64);
    let h_y_given_x = (covered / total) * entropy2(p, n)
        + ((total - covered) / total) * entropy2(rest_pos, rest_neg);
    // Rounding can leave a tiny negative residue when X is independent of Y.
    (h_y - h_y_given_x).max(0.0)
}

impl fmt::Display for Measure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Measure {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "precision" => Ok(Measure::Precision),
            "wlap" => Ok(Measure::WLap),
            "c2" => Ok(Measure::C2),
            "gain" => Ok(Measure::Gain),
            "corr" | "correlation" => Ok(Measure::Correlation),
            "rss" => Ok(Measure::Rss),
            "lift" => Ok(Measure::Lift),
            _ => Err(Error::UnknownMeasure(s.to_string())),
        }
    }
}

fn ln_choose(n: u64, k: u64) -> f64 {
    ln_factorial(n) - ln_factorial(k) - ln_factorial(n - k)
}

/// One-sided Fisher exact test for over-representation of positives among the
/// covered examples: `P[X >= p]` for `X ~ Hypergeom(P + N, P, p + n)`.
pub fn fisher_p_value(cm: &ConfusionMatrix) -> f64 {
    let total = cm.total();
    let draws = cm.covered();
    let hi = draws.min(cm.pos);
    if cm.p > hi {
        return 0.0;
    }
    let ln_denom = ln_choose(total, draws);
    let mut sum = 0.0;
    for x in cm.p..=hi {
        let others = draws - x;
        if others > cm.neg {
            continue;
        }
        sum += (ln_choose(cm.pos, x) + ln_choose(cm.neg, others) - ln_denom).exp();
    }
    sum.min(1.0)
}

/// Benjamini-Hochberg adjusted p-values, returned in input order.
pub fn fdr_adjust(pvalues: &[f64]) -> Vec<f64> {
    let m = pvalues.len();
    let mut order: Vec<usize> = (0..m).collect();
    order.sort_by(|&a, &b| pvalues[a].total_cmp(&pvalues[b]).then(a.cmp(&b)));
    let mut adjusted = vec![0.0; m];
    let mut running = f64::INFINITY;
    for rank in (0..m).rev() {
        let i = order[rank];
        let q = pvalues[i] * m as f64 / (rank + 1) as f64;
        running = running.min(q);
        adjusted[i] = running.min(1.0);
    }
    adjusted
}
