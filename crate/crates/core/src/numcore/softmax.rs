use ndarray::{Array1, Array2, ArrayView1, ArrayView2};

/// Overflow-safe softmax (shifted by the maximum).
pub fn softmax(v: ArrayView1<'_, f64>) -> Array1<f64> {
    let max = v.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let mut out = v.mapv(|x| (x - max).exp());
    let z = out.sum();
    out /= z;
    out
}

pub fn log_softmax(v: ArrayView1<'_, f64>) -> Array1<f64> {
    let max = v.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let lse = max + v.iter().map(|x| (x - max).exp()).sum::<f64>().ln();
    v.mapv(|x| x - lse)
}

/// Row-wise softmax of a score matrix.
pub fn softmax_rows(scores: ArrayView2<'_, f64>) -> Array2<f64> {
    let mut out = scores.to_owned();
    for mut row in out.rows_mut() {
        let max = row.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        row.mapv_inplace(|x| (x - max).exp());
        let z = row.sum();
        row /= z;
    }
    out
}

/// Jacobian-vector product of softmax at probabilities `p`:
/// `J v = p ⊙ (v - <p, v>)`.
pub fn softmax_jvp(p: ArrayView1<'_, f64>, v: ArrayView1<'_, f64>) -> Array1<f64> {
    let dot = p.dot(&v);
    let mut out = v.to_owned();
    out -= dot;
    out *= &p;
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use ndarray::array;

    #[test]
    fn uniform_input() {
        let p = softmax(array![0.0, 0.0, 0.0].view());
        for v in p.iter() {
            assert!((v - 1.0 / 3.0).abs() < 1e-15);
        }
    }

    #[test]
    fn large_inputs_do_not_overflow() {
        let p = softmax(array![1000.0, 0.0].view());
        assert!(p.iter().all(|v| v.is_finite()));
        assert_eq!(p[0], 1.0);
        assert!(p[1] < 1e-300);
    }

    #[test]
    fn reference_values() {
        // e^1, e^2, e^3 normalised; evaluated in extended precision
        let p = softmax(array![1.0, 2.0, 3.0].view());
        let expect = [0.090_030_573_170_380_46, 0.244_728_471_054_797_64, 0.665_240_955_774_821_9];
        for (a, b) in p.iter().zip(expect) {
            assert!((a - b).abs() < 1e-12);
        }
        assert!((p.sum() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn log_softmax_matches_log_of_softmax() {
        let v = array![0.3, -1.2, 2.5, 0.0];
        let a = log_softmax(v.view());
        let b = softmax(v.view()).mapv(f64::ln);
        for (x, y) in a.iter().zip(b.iter()) {
            assert!((x - y).abs() < 1e-12);
        }
    }
}
