//! Sample variance, covariance and Pearson correlation, generic over the
//! float type.
//!
//! All estimators use the unbiased `n - 1` denominator and a two-pass
//! (mean, then deviations) evaluation with plain left-to-right summation.
//! A correlation involving a zero-variance input is reported as `None`
//! rather than NaN.

use std::fmt::{self, Display, Write as _};

use num_traits::Float;

use crate::error::{Error, Result};

/// A validated sample of at least two observations.
#[derive(Debug, Clone, PartialEq)]
pub struct SampleVector<T> {
    values: Vec<T>,
}

impl<T: Float> SampleVector<T> {
    pub fn new(values: Vec<T>) -> Result<Self> {
        check_len(values.len())?;
        Ok(SampleVector { values })
    }

    pub fn values(&self) -> &[T] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn mean(&self) -> T {
        mean(&self.values)
    }

    pub fn variance(&self) -> T {
        variance_unchecked(&self.values)
    }

    pub fn covariance(&self, other: &SampleVector<T>) -> Result<T> {
        covariance(&self.values, &other.values)
    }

    pub fn correlation(&self, other: &SampleVector<T>) -> Result<Option<T>> {
        correlation(&self.values, &other.values)
    }
}

impl<T> AsRef<[T]> for SampleVector<T> {
    fn as_ref(&self) -> &[T] {
        &self.values
    }
}

fn check_len(n: usize) -> Result<()> {
    if n < 2 {
        return Err(Error::arg(format!("need at least 2 samples, got {n}")));
    }
    Ok(())
}

fn check_pair(n: usize, m: usize) -> Result<()> {
    if n != m {
        return Err(Error::arg(format!("sample length mismatch: {n} vs {m}")));
    }
    check_len(n)
}

fn count<T: Float>(n: usize) -> T {
    T::from(n).expect("sample count representable as float")
}

fn mean<T: Float>(x: &[T]) -> T {
    x.iter().fold(T::zero(), |acc, &v| acc + v) / count(x.len())
}

fn is_constant<T: Float>(x: &[T]) -> bool {
    x.windows(2).all(|w| w[0] == w[1])
}

fn variance_unchecked<T: Float>(x: &[T]) -> T {
    if is_constant(x) {
        return T::zero();
    }
    let m = mean(x);
    let ss = x.iter().fold(T::zero(), |acc, &v| {
        let d = v - m;
        acc + d * d
    });
    ss / count(x.len() - 1)
}

fn covariance_unchecked<T: Float>(x: &[T], y: &[T]) -> T {
    let (mx, my) = (mean(x), mean(y));
    let sp = x
        .iter()
        .zip(y)
        .fold(T::zero(), |acc, (&a, &b)| acc + (a - mx) * (b - my));
    sp / count(x.len() - 1)
}

/// Unbiased sample variance `sum((x - mean)^2) / (n - 1)`.
pub fn variance<T: Float>(x: &[T]) -> Result<T> {
    check_len(x.len())?;
    Ok(variance_unchecked(x))
}

/// Unbiased sample covariance `sum((x - mx)(y - my)) / (n - 1)`.
pub fn covariance<T: Float>(x: &[T], y: &[T]) -> Result<T> {
    check_pair(x.len(), y.len())?;
    Ok(covariance_unchecked(x, y))
}

/// Pearson correlation, or `None` when either input has zero variance.
pub fn correlation<T: Float>(x: &[T], y: &[T]) -> Result<Option<T>> {
    check_pair(x.len(), y.len())?;
    let (vx, vy) = (variance_unchecked(x), variance_unchecked(y));
    if vx == T::zero() || vy == T::zero() {
        return Ok(None);
    }
    Ok(Some(covariance_unchecked(x, y) / (vx * vy).sqrt()))
}

/// Symmetric matrix of pairwise correlations between labeled columns.
#[derive(Debug, Clone, PartialEq)]
pub struct CorrelationMatrix<T> {
    labels: Vec<String>,
    entries: Vec<Option<T>>,
}

impl<T: Float> CorrelationMatrix<T> {
    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn get(&self, i: usize, j: usize) -> Option<T> {
        self.entries[i * self.labels.len() + j]
    }

    pub fn position(&self, label: &str) -> Option<usize> {
        self.labels.iter().position(|l| l == label)
    }
}

impl<T: Float + Display> CorrelationMatrix<T> {
    /// CSV with a header row and a leading label column; undefined
    /// entries are written as `NA`.
    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        out.push_str("label");
        for l in &self.labels {
            let _ = write!(out, ",{l}");
        }
        out.push('\n');
        for (i, l) in self.labels.iter().enumerate() {
            out.push_str(l);
            for j in 0..self.labels.len() {
                match self.get(i, j) {
                    Some(v) => {
                        let _ = write!(out, ",{v}");
                    }
                    None => out.push_str(",NA"),
                }
            }
            out.push('\n');
        }
        out
    }
}

impl<T: Float + Display> Display for CorrelationMatrix<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let width = self.labels.iter().map(|l| l.len()).max().unwrap_or(0).max(6);
        write!(f, "{:width$}", "")?;
        for l in &self.labels {
            write!(f, " {l:>width$}")?;
        }
        writeln!(f)?;
        for (i, l) in self.labels.iter().enumerate() {
            write!(f, "{l:width$}")?;
            for j in 0..self.labels.len() {
                match self.get(i, j) {
                    Some(v) => write!(f, " {:>width$.3}", v.to_f64().unwrap_or(f64::NAN))?,
                    None => write!(f, " {:>width$}", "NA")?,
                }
            }
            writeln!(f)?;
        }
        Ok(())
    }
}

/// Pairwise [`correlation`] over every pair of labeled columns.
pub fn correlation_matrix<T, S, V>(columns: &[(S, V)]) -> Result<CorrelationMatrix<T>>
where
    T: Float,
    S: AsRef<str>,
    V: AsRef<[T]>,
{
    let k = columns.len();
    if let Some((_, first)) = columns.first() {
        let n = first.as_ref().len();
        for (_, col) in columns {
            check_pair(n, col.as_ref().len())?;
        }
    }
    let mut entries = vec![None; k * k];
    for i in 0..k {
        for j in i..k {
            let r = correlation(columns[i].1.as_ref(), columns[j].1.as_ref())?;
            entries[i * k + j] = r;
            entries[j * k + i] = r;
        }
    }
    Ok(CorrelationMatrix {
        labels: columns.iter().map(|(l, _)| l.as_ref().to_string()).collect(),
        entries,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn close(a: f64, b: f64) -> bool {
        (a - b).abs() <= 1e-12 * b.abs().max(1.0)
    }

    #[test]
    fn variance_examples() {
        assert_eq!(variance(&[1.0, 2.0, 3.0]).unwrap(), 1.0);
        assert_eq!(variance(&[4.5f64; 7]).unwrap(), 0.0);
        assert_eq!(variance(&[0.1f64; 3]).unwrap(), 0.0);
        assert!(close(variance(&[1.0, 2.0, 3.0, 4.0]).unwrap(), 5.0 / 3.0));
        assert!(variance(&[1.0f64]).is_err());
        assert!(variance::<f64>(&[]).is_err());
    }

    #[test]
    fn covariance_examples() {
        let x = [1.0, 2.0, 3.0, 4.0];
        assert_eq!(covariance(&x, &x).unwrap(), variance(&x).unwrap());
        assert_eq!(covariance(&[1.0, 2.0, 3.0], &[3.0, 2.0, 1.0]).unwrap(), -1.0);
        assert!(close(covariance(&x, &[1.0, 3.0, 2.0, 4.0]).unwrap(), 4.0 / 3.0));
        assert!(covariance(&x, &[1.0, 2.0]).is_err());
        assert!(covariance(&[1.0], &[1.0]).is_err());
    }

    #[test]
    fn correlation_examples() {
        let x = [1.0, 2.0, 3.0, 4.0];
        assert_eq!(correlation(&x, &x).unwrap(), Some(1.0));
        let r = correlation(&x, &[1.0, 3.0, 2.0, 4.0]).unwrap().unwrap();
        assert!(close(r, 0.8), "{r}");
        assert_eq!(correlation(&[2.0, 2.0, 2.0, 2.0], &x).unwrap(), None);
        assert!(correlation(&x, &[1.0, 2.0, 3.0]).is_err());
    }

    #[test]
    fn works_in_single_precision() {
        let x = [1.0f32, 2.0, 3.0, 4.0];
        let y = [1.0f32, 3.0, 2.0, 4.0];
        let r = correlation(&x, &y).unwrap().unwrap();
        assert!((r - 0.8).abs() < 1e-6);
        let sv = SampleVector::new(vec![1.0f32, 2.0, 3.0]).unwrap();
        assert_eq!(sv.variance(), 1.0);
        assert!(SampleVector::new(vec![1.0f32]).is_err());
    }

    #[test]
    fn matrix_shape_and_entries() {
        let a = vec![1.0, 2.0, 3.0, 5.0];
        let b = a.clone();
        let c = vec![7.0, 7.0, 7.0, 7.0];
        let m = correlation_matrix(&[("a", &a), ("b", &b), ("c", &c)]).unwrap();
        assert_eq!(m.len(), 3);
        assert_eq!(m.get(0, 1), Some(1.0));
        assert_eq!(m.get(0, 0), Some(1.0));
        assert_eq!(m.get(2, 2), None);
        assert_eq!(m.get(0, 2), None);
        let csv = m.to_csv();
        assert_eq!(csv.lines().next().unwrap(), "label,a,b,c");
        assert_eq!(csv.lines().nth(3).unwrap(), "c,NA,NA,NA");

        let bad = vec![1.0, 2.0];
        assert!(correlation_matrix(&[("a", &a), ("bad", &bad)]).is_err());
    }

    #[test]
    fn twelve_column_matrix() {
        let cols: Vec<(String, Vec<f64>)> = (0..12)
            .map(|k| (format!("c{k}"), (0..50).map(|i| ((i * (k + 3)) % 17) as f64).collect()))
            .collect();
        let m = correlation_matrix(&cols).unwrap();
        assert_eq!(m.len(), 12);
        for i in 0..12 {
            assert_eq!(m.get(i, i), Some(1.0));
            for j in 0..12 {
                assert_eq!(m.get(i, j), m.get(j, i));
                assert_eq!(m.get(i, j), correlation(&cols[i].1, &cols[j].1).unwrap());
            }
        }
    }

    fn vec_pair() -> impl Strategy<Value = (Vec<f64>, Vec<f64>)> {
        (2usize..60).prop_flat_map(|n| {
            (
                prop::collection::vec(-1e3f64..1e3, n),
                prop::collection::vec(-1e3f64..1e3, n),
            )
        })
    }

    proptest! {
        #[test]
        fn bounded_by_one((x, y) in vec_pair()) {
            if let Some(r) = correlation(&x, &y).unwrap() {
                prop_assert!(r.abs() <= 1.0 + 1e-12);
            }
        }

        #[test]
        fn affine_invariance((x, y) in vec_pair(), a in 0.01f64..100.0, b in -1e3f64..1e3) {
            let xt: Vec<f64> = x.iter().map(|v| a * v + b).collect();
            match (correlation(&x, &y).unwrap(), correlation(&xt, &y).unwrap()) {
                (Some(r0), Some(r1)) => prop_assert!((r0 - r1).abs() <= 1e-9, "{} vs {}", r0, r1),
                (None, None) => {}
                other => prop_assert!(false, "definedness changed: {:?}", other),
            }
        }

        #[test]
        fn covariance_symmetric((x, y) in vec_pair()) {
            prop_assert_eq!(covariance(&x, &y).unwrap(), covariance(&y, &x).unwrap());
        }
    }
}
