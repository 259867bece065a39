//! Sample evaluation engine: runs a suite's independent sample
//! evaluations either on the rayon pool or sequentially, and folds the
//! outcomes into an order-insensitive aggregate.

#[cfg(feature = "parallel")]
use rayon::prelude::*;

/// Result of evaluating one sample.
///
/// `value` is the tested quantity on a margin scale: positive means the
/// sample has headroom, and `pass` records whether it cleared the
/// suite's floor. The optional coordinates locate the sample for
/// reports.
#[derive(Clone, Debug)]
pub(crate) struct Outcome {
    pub index: usize,
    pub pass: bool,
    pub value: f64,
    pub t: Option<f64>,
    pub s: Option<f64>,
    pub x: Option<f64>,
    pub a: Option<f64>,
    pub b: Option<f64>,
}

impl Outcome {
    pub fn new(index: usize, pass: bool, value: f64) -> Self {
        Outcome {
            index,
            pass,
            value,
            t: None,
            s: None,
            x: None,
            a: None,
            b: None,
        }
    }

    pub fn at_x(mut self, x: f64) -> Self {
        self.x = Some(x);
        self
    }

    pub fn at_pair(mut self, a: f64, b: f64) -> Self {
        self.a = Some(a);
        self.b = Some(b);
        self
    }

    pub fn at_ts(mut self, t: f64, s: f64) -> Self {
        self.t = Some(t);
        self.s = Some(s);
        self
    }

    /// A NaN value can never count as a pass; map it to negative
    /// infinity so the min-aggregation stays order insensitive.
    fn sanitized(mut self) -> Self {
        if self.value.is_nan() {
            self.value = f64::NEG_INFINITY;
            self.pass = false;
        }
        self
    }
}

/// Order-insensitive aggregate of sample outcomes: counts, the minimum
/// value, and the failure with the smallest sample index.
#[derive(Clone, Debug)]
pub(crate) struct Agg {
    pub samples: usize,
    pub passes: usize,
    pub worst: f64,
    pub first_fail: Option<Outcome>,
}

impl Agg {
    fn identity() -> Self {
        Agg {
            samples: 0,
            passes: 0,
            worst: f64::INFINITY,
            first_fail: None,
        }
    }

    fn absorb(mut self, outcome: Outcome) -> Self {
        let outcome = outcome.sanitized();
        self.samples += 1;
        if outcome.pass {
            self.passes += 1;
        }
        if outcome.value < self.worst {
            self.worst = outcome.value;
        }
        if !outcome.pass {
            let earlier = match &self.first_fail {
                Some(f) => outcome.index < f.index,
                None => true,
            };
            if earlier {
                self.first_fail = Some(outcome);
            }
        }
        self
    }

    #[cfg(feature = "parallel")]
    fn merge(left: Self, right: Self) -> Self {
        let first_fail = match (left.first_fail, right.first_fail) {
            (Some(l), Some(r)) => Some(if l.index <= r.index { l } else { r }),
            (l, r) => l.or(r),
        };
        Agg {
            samples: left.samples + right.samples,
            passes: left.passes + right.passes,
            worst: left.worst.min(right.worst),
            first_fail,
        }
    }
}

/// Evaluates every input and aggregates the outcomes. With `parallel`
/// set (and the `parallel` feature compiled in) samples are evaluated
/// on the rayon pool; the aggregate is identical either way. When
/// `detailed` is set the per-sample outcomes are also returned, in
/// input order.
pub(crate) fn run_samples<I, F>(
    inputs: &[I],
    parallel: bool,
    detailed: bool,
    eval: F,
) -> (Agg, Option<Vec<Outcome>>)
where
    I: Sync,
    F: Fn(usize, &I) -> Outcome + Sync,
{
    if detailed {
        let outcomes = collect_outcomes(inputs, parallel, &eval);
        let agg = outcomes
            .iter()
            .fold(Agg::identity(), |agg, o| agg.absorb(o.clone()));
        return (agg, Some(outcomes));
    }

    #[cfg(feature = "parallel")]
    if parallel {
        let agg = inputs
            .par_iter()
            .enumerate()
            .map(|(i, input)| eval(i, input))
            .fold(Agg::identity, Agg::absorb)
            .reduce(Agg::identity, Agg::merge);
        return (agg, None);
    }
    #[cfg(not(feature = "parallel"))]
    let _ = parallel;

    let agg = inputs
        .iter()
        .enumerate()
        .map(|(i, input)| eval(i, input))
        .fold(Agg::identity(), |agg, o| agg.absorb(o));
    (agg, None)
}

fn collect_outcomes<I, F>(inputs: &[I], parallel: bool, eval: &F) -> Vec<Outcome>
where
    I: Sync,
    F: Fn(usize, &I) -> Outcome + Sync,
{
    #[cfg(feature = "parallel")]
    if parallel {
        return inputs
            .par_iter()
            .enumerate()
            .map(|(i, input)| eval(i, input))
            .collect();
    }
    #[cfg(not(feature = "parallel"))]
    let _ = parallel;

    inputs
        .iter()
        .enumerate()
        .map(|(i, input)| eval(i, input))
        .collect()
}
