//! Distribution of indicators over wash-labeled versus unlabeled NFTs.

use std::cmp::Ordering;
use std::collections::HashSet;

use serde_json::{Value, json};

use crate::indicators::NftIndicators;
use crate::scalar::Real;
use crate::types::NftKey;

/// Min, quartiles and max with linearly interpolated quantiles.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FiveNumber<F> {
    pub count: usize,
    pub min: F,
    pub q1: F,
    pub median: F,
    pub q3: F,
    pub max: F,
}

impl<F: Real> FiveNumber<F> {
    /// `None` for an empty population. NaNs are dropped.
    pub fn of(values: impl IntoIterator<Item = F>) -> Option<Self> {
        let mut v: Vec<F> = values.into_iter().filter(|x| !x.is_nan()).collect();
        if v.is_empty() {
            return None;
        }
        v.sort_by(|a, b| a.partial_cmp(b).unwrap_or(Ordering::Equal));
        let q = |p: f64| {
            let pos = p * (v.len() - 1) as f64;
            let lo = pos.floor() as usize;
            let hi = pos.ceil() as usize;
            let frac = F::from_f64_lossy(pos - lo as f64);
            v[lo] + (v[hi] - v[lo]) * frac
        };
        Some(FiveNumber {
            count: v.len(),
            min: v[0],
            q1: q(0.25),
            median: q(0.5),
            q3: q(0.75),
            max: v[v.len() - 1],
        })
    }

    fn to_json(self) -> Value {
        let n = |x: F| serde_json::Number::from_f64(x.to_f64_lossy()).map_or(Value::Null, Value::Number);
        json!({
            "count": self.count,
            "min": n(self.min),
            "q1": n(self.q1),
            "median": n(self.median),
            "q3": n(self.q3),
            "max": n(self.max),
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IndicatorComparison<F> {
    pub labeled: Option<FiveNumber<F>>,
    pub unlabeled: Option<FiveNumber<F>>,
}

impl<F: Real> IndicatorComparison<F> {
    /// Labeled median minus unlabeled median.
    pub fn median_gap(&self) -> Option<F> {
        Some(self.labeled?.median - self.unlabeled?.median)
    }

    /// -1, 0 or +1.
    pub fn gap_sign(&self) -> Option<i8> {
        self.median_gap().map(|g| {
            if g > F::zero() {
                1
            } else if g < F::zero() {
                -1
            } else {
                0
            }
        })
    }

    fn to_json(self) -> Value {
        json!({
            "labeled": self.labeled.map_or(Value::Null, FiveNumber::to_json),
            "unlabeled": self.unlabeled.map_or(Value::Null, FiveNumber::to_json),
            "median_gap": self.median_gap()
                .and_then(|g| serde_json::Number::from_f64(g.to_f64_lossy()))
                .map_or(Value::Null, Value::Number),
            "median_gap_sign": self.gap_sign(),
        })
    }
}

/// Volume is compared as wei converted to `F`. NFTs with an undefined
/// Fratio take part in the volume and P comparisons only.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LabeledComparison<F> {
    pub volume: IndicatorComparison<F>,
    pub fratio: IndicatorComparison<F>,
    pub p_value: IndicatorComparison<F>,
}

impl<F: Real> LabeledComparison<F> {
    pub fn to_json(&self) -> Value {
        json!({
            "volume": self.volume.to_json(),
            "fratio": self.fratio.to_json(),
            "p_value": self.p_value.to_json(),
        })
    }
}

pub fn compare_labeled<F: Real>(nft_inds: &[NftIndicators<F>], wash_labels: &HashSet<NftKey>) -> LabeledComparison<F> {
    let (labeled, unlabeled): (Vec<&NftIndicators<F>>, Vec<&NftIndicators<F>>) =
        nft_inds.iter().partition(|n| wash_labels.contains(&n.nft));
    let side = |pick: &dyn Fn(&NftIndicators<F>) -> Option<F>| IndicatorComparison {
        labeled: FiveNumber::of(labeled.iter().filter_map(|n| pick(n))),
        unlabeled: FiveNumber::of(unlabeled.iter().filter_map(|n| pick(n))),
    };
    LabeledComparison {
        volume: side(&|n| Some(F::from_wei(n.volume_wei))),
        fratio: side(&|n| n.fratio),
        p_value: side(&|n| Some(n.p_value)),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::testutil::nft;
    use alloy_primitives::U256;

    #[test]
    fn five_number_interpolates() {
        let s = FiveNumber::of([4.0, 1.0, 3.0, 2.0]).unwrap();
        assert_eq!((s.min, s.q1, s.median, s.q3, s.max), (1.0, 1.75, 2.5, 3.25, 4.0));
        let one = FiveNumber::of([7.0f64]).unwrap();
        assert_eq!((one.q1, one.median, one.q3), (7.0, 7.0, 7.0));
        assert!(FiveNumber::<f64>::of([]).is_none());
    }

    fn ind(token: u64, volume: u64, p: f64, fratio: Option<f64>) -> NftIndicators<f64> {
        NftIndicators {
            nft: nft(1, token),
            n: 2,
            p_value: p,
            fratio,
            volume_wei: U256::from(volume),
            transferors: 2,
        }
    }

    #[test]
    fn gap_signs() {
        let inds = [ind(1, 100, 5.0, Some(50.0)), ind(2, 1, 500.0, Some(1.0)), ind(3, 2, 400.0, None)];
        let c = compare_labeled(&inds, &HashSet::from([nft(1, 1)]));
        assert_eq!(c.volume.gap_sign(), Some(1));
        assert_eq!(c.fratio.gap_sign(), Some(1));
        assert_eq!(c.p_value.gap_sign(), Some(-1));
        assert_eq!(c.fratio.unlabeled.unwrap().count, 1);
        assert_eq!(c.volume.unlabeled.unwrap().count, 2);
    }

    #[test]
    fn identical_populations_have_zero_gap() {
        let a = ind(1, 10, 3.0, Some(2.0));
        let mut b = a.clone();
        b.nft = nft(1, 2);
        let c = compare_labeled(&[a, b], &HashSet::from([nft(1, 1)]));
        assert_eq!(c.volume.gap_sign(), Some(0));
        assert_eq!(c.p_value.median_gap(), Some(0.0));
    }

    #[test]
    fn empty_label_set_leaves_labeled_side_unavailable() {
        let c = compare_labeled(&[ind(1, 10, 3.0, None)], &HashSet::new());
        assert!(c.volume.labeled.is_none());
        assert!(c.volume.unlabeled.is_some());
        assert_eq!(c.volume.gap_sign(), None);
        assert_eq!(c.to_json()["volume"]["labeled"], Value::Null);
    }
}
