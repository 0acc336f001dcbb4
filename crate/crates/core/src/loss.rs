//! Word-level losses for the speaker's auxiliary tasks.
//!
//! Each generated word is scored against the three human instructions'
//! words (`originals`), optionally against up to N recommended object words
//! weighted by λ, and optionally against the crafted instruction's word
//! weighted by β:
//!
//! ```text
//! total = Σ_{3 originals} NLL + λ · Σ_{N objects} NLL + β · NLL(crafted)
//! ```
//!
//! All arithmetic is f64 with max-subtracted log-sum-exp.

use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::vec::Vec;

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum LossError {
    #[error("logits must be non-empty")]
    EmptyLogits,
    #[error("logit {index} is not finite")]
    NonFinite { index: usize },
    #[error("target index {index} out of range for vocabulary of {vocab}")]
    TargetOutOfRange { index: usize, vocab: usize },
    #[error("{name} weight must be non-negative, got {value}")]
    NegativeWeight { name: &'static str, value: f64 },
    #[error("{0} weight is positive but no targets were given")]
    MissingTargets(&'static str),
    #[error("{logits} logit vectors but {targets} target sets")]
    LengthMismatch { logits: usize, targets: usize },
    #[error("duplicate vocabulary token `{0}`")]
    DuplicateToken(String),
}

/// Token ↔ index table.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Vocab {
    tokens: Vec<String>,
    index: BTreeMap<String, usize>,
}

impl Vocab {
    pub fn new<I, S>(tokens: I) -> Result<Self, LossError>
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let mut v = Vocab::default();
        for t in tokens {
            let t = t.into();
            if v.index.contains_key(&t) {
                return Err(LossError::DuplicateToken(t));
            }
            v.index.insert(t.clone(), v.tokens.len());
            v.tokens.push(t);
        }
        Ok(v)
    }

    pub fn len(&self) -> usize {
        self.tokens.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tokens.is_empty()
    }

    pub fn index_of(&self, token: &str) -> Option<usize> {
        self.index.get(token).copied()
    }

    pub fn token(&self, index: usize) -> Option<&str> {
        self.tokens.get(index).map(String::as_str)
    }
}

/// Targets for one generated word.
#[derive(Debug, Clone, PartialEq)]
pub struct WordTargets {
    pub originals: [usize; 3],
    pub objects: Vec<usize>,
    pub crafted: Option<usize>,
}

impl WordTargets {
    fn check(&self, vocab: usize) -> Result<(), LossError> {
        let all = self
            .originals
            .iter()
            .chain(self.objects.iter())
            .chain(self.crafted.iter());
        for &index in all {
            if index >= vocab {
                return Err(LossError::TargetOutOfRange { index, vocab });
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LossBreakdown {
    pub base: f64,
    pub objects_term: f64,
    pub crafted_term: f64,
    pub total: f64,
    pub lambda: f64,
    pub beta: f64,
}

pub fn log_softmax(logits: &[f64]) -> Result<Vec<f64>, LossError> {
    if logits.is_empty() {
        return Err(LossError::EmptyLogits);
    }
    if let Some(index) = logits.iter().position(|x| !x.is_finite()) {
        return Err(LossError::NonFinite { index });
    }
    let m = logits.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let sum: f64 = logits.iter().map(|x| libm::exp(x - m)).sum();
    let lse = m + libm::log(sum);
    Ok(logits.iter().map(|x| x - lse).collect())
}

pub fn softmax(logits: &[f64]) -> Result<Vec<f64>, LossError> {
    Ok(log_softmax(logits)?.into_iter().map(libm::exp).collect())
}

pub fn nll(logp: &[f64], target: usize) -> Result<f64, LossError> {
    logp.get(target)
        .map(|lp| -lp)
        .ok_or(LossError::TargetOutOfRange {
            index: target,
            vocab: logp.len(),
        })
}

fn check_weight(name: &'static str, value: f64) -> Result<(), LossError> {
    if !(value >= 0.0) {
        return Err(LossError::NegativeWeight { name, value });
    }
    Ok(())
}

/// Combined word loss with both auxiliary terms. A zero weight disables its
/// term (and its targets may then be absent).
pub fn word_loss(
    logits: &[f64],
    targets: &WordTargets,
    lambda: f64,
    beta: f64,
) -> Result<LossBreakdown, LossError> {
    check_weight("lambda", lambda)?;
    check_weight("beta", beta)?;
    if lambda > 0.0 && targets.objects.is_empty() {
        return Err(LossError::MissingTargets("lambda"));
    }
    if beta > 0.0 && targets.crafted.is_none() {
        return Err(LossError::MissingTargets("beta"));
    }
    let logp = log_softmax(logits)?;
    targets.check(logp.len())?;
    let base: f64 = targets.originals.iter().map(|&t| -logp[t]).sum();
    let objects_term: f64 = targets.objects.iter().map(|&t| -logp[t]).sum();
    let crafted_term = targets.crafted.map_or(0.0, |t| -logp[t]);
    let mut total = base;
    if lambda > 0.0 {
        total += lambda * objects_term;
    }
    if beta > 0.0 {
        total += beta * crafted_term;
    }
    Ok(LossBreakdown {
        base,
        objects_term,
        crafted_term,
        total,
        lambda,
        beta,
    })
}

/// Originals plus the λ-weighted object term.
pub fn word_loss_objects(
    logits: &[f64],
    targets: &WordTargets,
    lambda: f64,
) -> Result<LossBreakdown, LossError> {
    word_loss(logits, targets, lambda, 0.0)
}

/// Originals plus the β-weighted crafted-word term.
pub fn word_loss_crafted(
    logits: &[f64],
    targets: &WordTargets,
    beta: f64,
) -> Result<LossBreakdown, LossError> {
    word_loss(logits, targets, 0.0, beta)
}

/// Mean of per-word totals.
pub fn sequence_loss(
    logits: &[Vec<f64>],
    targets: &[WordTargets],
    lambda: f64,
    beta: f64,
) -> Result<f64, LossError> {
    if logits.len() != targets.len() {
        return Err(LossError::LengthMismatch {
            logits: logits.len(),
            targets: targets.len(),
        });
    }
    if logits.is_empty() {
        return Ok(0.0);
    }
    let mut sum = 0.0;
    for (l, t) in logits.iter().zip(targets) {
        sum += word_loss(l, t, lambda, beta)?.total;
    }
    Ok(sum / logits.len() as f64)
}

/// Gradient of [`word_loss`]'s total with respect to the logits:
/// `W · softmax(logits) − Σ_t w_t · onehot(t)` with `W = Σ_t w_t`.
pub fn grad_logits(
    logits: &[f64],
    targets: &WordTargets,
    lambda: f64,
    beta: f64,
) -> Result<Vec<f64>, LossError> {
    // validates weights and targets
    word_loss(logits, targets, lambda, beta)?;
    let p = softmax(logits)?;
    let mut weighted: Vec<(usize, f64)> = targets.originals.iter().map(|&t| (t, 1.0)).collect();
    if lambda > 0.0 {
        weighted.extend(targets.objects.iter().map(|&t| (t, lambda)));
    }
    if beta > 0.0 {
        weighted.extend(targets.crafted.iter().map(|&t| (t, beta)));
    }
    let total_weight: f64 = weighted.iter().map(|(_, w)| w).sum();
    let mut g: Vec<f64> = p.iter().map(|pi| total_weight * pi).collect();
    for (t, w) in weighted {
        g[t] -= w;
    }
    Ok(g)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::SplitMix64;
    use proptest::prelude::*;

    const LN4: f64 = 1.386_294_361_119_890_6;
    const LN10: f64 = core::f64::consts::LN_10;

    fn t3(a: usize, b: usize, c: usize) -> WordTargets {
        WordTargets {
            originals: [a, b, c],
            objects: Vec::new(),
            crafted: None,
        }
    }

    #[test]
    fn log_softmax_examples() {
        let lp = log_softmax(&[0.5; 4]).unwrap();
        for x in &lp {
            assert!((x + LN4).abs() < 1e-15);
        }
        let shifted = log_softmax(&[3.5; 4]).unwrap();
        for (a, b) in lp.iter().zip(&shifted) {
            assert!((a - b).abs() < 1e-15);
        }
        let big = log_softmax(&[1000.0, 0.0]).unwrap();
        assert_eq!(big[0], 0.0);
        assert!((big[1] + 1000.0).abs() < 1e-12);
        assert!(log_softmax(&[1.0, f64::NAN]).is_err());
        assert!(log_softmax(&[]).is_err());
        let s: f64 = log_softmax(&[0.3, -2.0, 5.0]).unwrap().iter().map(|x| x.exp()).sum();
        assert!((s - 1.0).abs() < 1e-12);
    }

    #[test]
    fn nll_examples() {
        let lp = log_softmax(&[0.0; 4]).unwrap();
        assert!((nll(&lp, 2).unwrap() - LN4).abs() < 1e-15);
        assert_eq!(nll(&[0.0, f64::NEG_INFINITY], 0).unwrap(), 0.0);
        let lp = log_softmax(&[2.0, 1.0, 0.0]).unwrap();
        let expected = (1.0 + (-1.0f64).exp() + (-2.0f64).exp()).ln();
        assert!((nll(&lp, 0).unwrap() - expected).abs() < 1e-15);
        assert!((nll(&lp, 0).unwrap() - 0.407606).abs() < 1e-6);
        assert!(nll(&lp, 3).is_err());
    }

    #[test]
    fn objects_loss_examples() {
        let logits = [0.0; 10];
        let mut t = t3(0, 1, 2);
        let b = word_loss_objects(&logits, &t, 0.0).unwrap();
        assert_eq!(b.total, b.base);
        t.objects = alloc::vec![3, 4];
        let b = word_loss_objects(&logits, &t, 0.5).unwrap();
        assert!((b.total - 4.0 * LN10).abs() < 1e-12);
        assert!((b.total - 9.210340).abs() < 1e-6);
        assert!(word_loss_objects(&logits, &t, -1.0).is_err());
        assert!(word_loss_objects(&logits, &t3(0, 1, 2), 0.5).is_err());
    }

    #[test]
    fn crafted_loss_examples() {
        let logits = [0.0; 10];
        let mut t = t3(0, 1, 2);
        assert!((word_loss_crafted(&logits, &t, 0.0).unwrap().total - 3.0 * LN10).abs() < 1e-12);
        t.crafted = Some(9);
        let b = word_loss_crafted(&logits, &t, 0.3).unwrap();
        assert!((b.total - 3.3 * LN10).abs() < 1e-12);
        assert!((b.total - 7.598531).abs() < 1e-6);
        assert!(word_loss_crafted(&logits, &t, -0.1).is_err());
    }

    #[test]
    fn sequence_mean() {
        let a = [1.0, 0.0, -1.0];
        let b = [0.0, 2.0, 0.5];
        let t = t3(0, 1, 2);
        let la = word_loss(&a, &t, 0.0, 0.0).unwrap().total;
        let lb = word_loss(&b, &t, 0.0, 0.0).unwrap().total;
        let seq = sequence_loss(&[a.to_vec()], core::slice::from_ref(&t), 0.0, 0.0).unwrap();
        assert_eq!(seq, la);
        let rep = sequence_loss(&[a.to_vec(), a.to_vec(), a.to_vec()], &[t.clone(), t.clone(), t.clone()], 0.0, 0.0).unwrap();
        assert!((rep - la).abs() < 1e-15);
        let two = sequence_loss(&[a.to_vec(), b.to_vec()], &[t.clone(), t.clone()], 0.0, 0.0).unwrap();
        assert!((two - (la + lb) / 2.0).abs() < 1e-15);
        assert!(sequence_loss(&[a.to_vec()], &[], 0.0, 0.0).is_err());
    }

    #[test]
    fn gradient_basics() {
        let t = WordTargets {
            originals: [0, 1, 1],
            objects: alloc::vec![2, 3],
            crafted: Some(4),
        };
        let g = grad_logits(&[0.1, -0.3, 2.0, 0.7, -1.1, 0.0, 0.4], &t, 0.5, 0.3).unwrap();
        assert!(g.iter().sum::<f64>().abs() < 1e-12);

        let mut sharp = [0.0; 5];
        sharp[2] = 50.0;
        let g = grad_logits(&sharp, &t3(2, 2, 2), 0.0, 0.0).unwrap();
        assert!(g.iter().all(|x| x.abs() < 1e-20));
    }

    #[test]
    fn vocab_bijection() {
        let v = Vocab::new(["walk", "bed", "table"]).unwrap();
        assert_eq!(v.len(), 3);
        for i in 0..3 {
            assert_eq!(v.index_of(v.token(i).unwrap()), Some(i));
        }
        assert!(Vocab::new(["a", "a"]).is_err());
    }

    #[test]
    fn weights_are_affine() {
        let mut rng = SplitMix64::new(5);
        let logits: Vec<f64> = (0..9).map(|_| rng.next_f64() * 4.0 - 2.0).collect();
        let t = WordTargets {
            originals: [0, 3, 5],
            objects: alloc::vec![1, 8],
            crafted: Some(2),
        };
        let at = |l: f64, b: f64| word_loss(&logits, &t, l, b).unwrap();
        let base = at(0.0, 0.0);
        for lam in [0.1, 0.5, 2.0] {
            let b = at(lam, 0.0);
            assert!((b.total - (base.total + lam * b.objects_term)).abs() < 1e-12);
        }
        for beta in [0.1, 0.3, 4.0] {
            let b = at(0.0, beta);
            assert!((b.total - (base.total + beta * b.crafted_term)).abs() < 1e-12);
        }
    }

    proptest! {
        #[test]
        fn shift_invariance(
            logits in proptest::collection::vec(-5.0f64..5.0, 6),
            shift in -100.0f64..100.0,
        ) {
            let t = WordTargets { originals: [0, 1, 2], objects: alloc::vec![3, 4], crafted: Some(5) };
            let shifted: Vec<f64> = logits.iter().map(|x| x + shift).collect();
            let a = word_loss(&logits, &t, 0.5, 0.3).unwrap();
            let b = word_loss(&shifted, &t, 0.5, 0.3).unwrap();
            prop_assert!((a.total - b.total).abs() < 1e-10);
            prop_assert!(a.total >= 0.0);
            let ga = grad_logits(&logits, &t, 0.5, 0.3).unwrap();
            let gb = grad_logits(&shifted, &t, 0.5, 0.3).unwrap();
            for (x, y) in ga.iter().zip(&gb) {
                prop_assert!((x - y).abs() < 1e-10);
            }
        }
    }
}
