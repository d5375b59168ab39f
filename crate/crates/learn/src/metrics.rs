use deepfuse_core::Label;
use serde::Serialize;

use crate::error::{LearnError, Result};

/// Counts with deepfake as the positive class.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
pub struct Confusion {
    pub tp: usize,
    pub fp: usize,
    pub tn: usize,
    #[serde(rename = "fn")]
    pub fn_: usize,
}

impl Confusion {
    pub fn from_labels(y_true: &[Label], y_pred: &[Label]) -> Confusion {
        let mut c = Confusion::default();
        for (&t, &p) in y_true.iter().zip(y_pred) {
            match (t, p) {
                (Label::Deepfake, Label::Deepfake) => c.tp += 1,
                (Label::Real, Label::Deepfake) => c.fp += 1,
                (Label::Real, Label::Real) => c.tn += 1,
                (Label::Deepfake, Label::Real) => c.fn_ += 1,
            }
        }
        c
    }

    pub fn total(&self) -> usize {
        self.tp + self.fp + self.tn + self.fn_
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ClassMetrics {
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
    pub support: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Report {
    pub confusion: Confusion,
    pub real: ClassMetrics,
    pub deepfake: ClassMetrics,
    pub macro_avg: ClassMetrics,
    pub weighted_avg: ClassMetrics,
    pub accuracy: f64,
    /// Ratios whose denominator was zero (reported as 0).
    pub undefined: Vec<String>,
}

fn ratio(num: usize, den: usize, name: String, undefined: &mut Vec<String>) -> f64 {
    if den == 0 {
        undefined.push(name);
        0.0
    } else {
        num as f64 / den as f64
    }
}

fn class_metrics(tp: usize, fp: usize, fn_: usize, class: &str, undefined: &mut Vec<String>) -> ClassMetrics {
    let precision = ratio(tp, tp + fp, format!("{class}.precision"), undefined);
    let recall = ratio(tp, tp + fn_, format!("{class}.recall"), undefined);
    let f1 = if precision + recall > 0.0 {
        2.0 * precision * recall / (precision + recall)
    } else {
        undefined.push(format!("{class}.f1"));
        0.0
    };
    ClassMetrics {
        precision,
        recall,
        f1,
        support: tp + fn_,
    }
}

fn average(a: &ClassMetrics, b: &ClassMetrics, wa: f64, wb: f64) -> ClassMetrics {
    ClassMetrics {
        precision: wa * a.precision + wb * b.precision,
        recall: wa * a.recall + wb * b.recall,
        f1: wa * a.f1 + wb * b.f1,
        support: a.support + b.support,
    }
}

pub fn classification_report(y_true: &[Label], y_pred: &[Label]) -> Result<Report> {
    if y_true.len() != y_pred.len() {
        return Err(LearnError::Shape(format!(
            "{} true labels vs {} predictions",
            y_true.len(),
            y_pred.len()
        )));
    }
    if y_true.is_empty() {
        return Err(LearnError::Data("classification report of zero samples".into()));
    }
    let c = Confusion::from_labels(y_true, y_pred);
    let mut undefined = Vec::new();
    let deepfake = class_metrics(c.tp, c.fp, c.fn_, "deepfake", &mut undefined);
    // the real class is positive when swapping roles
    let real = class_metrics(c.tn, c.fn_, c.fp, "real", &mut undefined);
    let n = c.total() as f64;
    Ok(Report {
        confusion: c,
        macro_avg: average(&real, &deepfake, 0.5, 0.5),
        weighted_avg: average(&real, &deepfake, real.support as f64 / n, deepfake.support as f64 / n),
        real,
        deepfake,
        accuracy: (c.tp + c.tn) as f64 / n,
        undefined,
    })
}

impl std::fmt::Display for Report {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        writeln!(f, "{:>14} {:>9} {:>9} {:>9} {:>9}", "", "precision", "recall", "f1-score", "support")?;
        for (name, m) in [("real", &self.real), ("deepfake", &self.deepfake)] {
            writeln!(
                f,
                "{name:>14} {:>9.4} {:>9.4} {:>9.4} {:>9}",
                m.precision, m.recall, m.f1, m.support
            )?;
        }
        writeln!(f)?;
        writeln!(f, "{:>14} {:>9} {:>9} {:>9.4} {:>9}", "accuracy", "", "", self.accuracy, self.confusion.total())?;
        for (name, m) in [("macro avg", &self.macro_avg), ("weighted avg", &self.weighted_avg)] {
            writeln!(
                f,
                "{name:>14} {:>9.4} {:>9.4} {:>9.4} {:>9}",
                m.precision, m.recall, m.f1, m.support
            )?;
        }
        if !self.undefined.is_empty() {
            writeln!(f, "undefined (reported as 0): {}", self.undefined.join(", "))?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use Label::{Deepfake as D, Real as R};

    fn labels_from(c: Confusion) -> (Vec<Label>, Vec<Label>) {
        let mut t = vec![];
        let mut p = vec![];
        for (n, tl, pl) in [(c.tp, D, D), (c.fp, R, D), (c.tn, R, R), (c.fn_, D, R)] {
            t.extend(std::iter::repeat_n(tl, n));
            p.extend(std::iter::repeat_n(pl, n));
        }
        (t, p)
    }

    #[test]
    fn forty_ten_ten_forty() {
        let (t, p) = labels_from(Confusion { tp: 40, fp: 10, tn: 40, fn_: 10 });
        let r = classification_report(&t, &p).unwrap();
        for m in [r.real, r.deepfake, r.macro_avg, r.weighted_avg] {
            assert_eq!((m.precision, m.recall), (0.8, 0.8));
            assert!((m.f1 - 0.8).abs() < 1e-15);
        }
        assert_eq!(r.accuracy, 0.8);
        assert!(r.undefined.is_empty());
    }

    #[test]
    fn hand_arithmetic() {
        let (t, p) = labels_from(Confusion { tp: 7, fp: 3, tn: 5, fn_: 1 });
        let r = classification_report(&t, &p).unwrap();
        assert_eq!(r.deepfake.precision, 0.7);
        assert_eq!(r.deepfake.recall, 0.875);
        assert_eq!(r.real.precision, 5.0 / 6.0);
        assert_eq!(r.real.recall, 5.0 / 8.0);
        assert_eq!(r.accuracy, 0.75);
        assert!((r.deepfake.f1 - 2.0 * 0.7 * 0.875 / 1.575).abs() < 1e-15);
        assert_eq!(r.weighted_avg.support, 16);
    }

    #[test]
    fn perfect_and_degenerate() {
        let r = classification_report(&[R, D, D], &[R, D, D]).unwrap();
        assert_eq!(r.accuracy, 1.0);
        assert_eq!(r.macro_avg.f1, 1.0);
        let r = classification_report(&[D, D], &[D, D]).unwrap();
        assert_eq!(r.real.precision, 0.0);
        assert!(r.undefined.contains(&"real.precision".to_string()));
        assert!(classification_report(&[], &[]).is_err());
        assert!(classification_report(&[R], &[]).is_err());
    }
}
