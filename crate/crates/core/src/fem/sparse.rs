//! Minimal CSR matrix with a Jacobi-preconditioned conjugate-gradient solve.
//! The matrices here are SPD by construction (d·K + M with d > 0); a CG
//! failure signals a broken mesh rather than a solver limitation.

#[derive(Debug, Clone)]
pub struct CsrMatrix {
    row_ptr: Vec<usize>,
    col_idx: Vec<usize>,
    vals: Vec<f64>,
}

impl CsrMatrix {
    pub fn from_parts(row_ptr: Vec<usize>, col_idx: Vec<usize>, vals: Vec<f64>) -> CsrMatrix {
        assert_eq!(col_idx.len(), vals.len());
        CsrMatrix { row_ptr, col_idx, vals }
    }

    pub fn n(&self) -> usize {
        self.row_ptr.len() - 1
    }

    pub fn apply(&self, x: &[f64], out: &mut [f64]) {
        for i in 0..self.n() {
            let mut acc = 0.0;
            for k in self.row_ptr[i]..self.row_ptr[i + 1] {
                acc += self.vals[k] * x[self.col_idx[k]];
            }
            out[i] = acc;
        }
    }

    fn diagonal(&self) -> Vec<f64> {
        let mut d = vec![0.0; self.n()];
        for i in 0..self.n() {
            for k in self.row_ptr[i]..self.row_ptr[i + 1] {
                if self.col_idx[k] == i {
                    d[i] = self.vals[k];
                }
            }
        }
        d
    }

    /// Solve A x = b with diagonal-preconditioned CG from a zero initial
    /// guess, to relative residual `rel_tol`.
    pub fn solve_cg_jacobi(
        &self,
        b: &[f64],
        rel_tol: f64,
        max_iter: usize,
    ) -> Result<Vec<f64>, String> {
        let n = self.n();
        assert_eq!(b.len(), n);
        let b_norm = b.iter().map(|v| v * v).sum::<f64>().sqrt();
        if b_norm == 0.0 {
            return Ok(vec![0.0; n]);
        }
        let diag = self.diagonal();
        if diag.iter().any(|&d| !(d > 0.0)) {
            return Err("system matrix has a nonpositive diagonal entry".into());
        }
        let mut x = vec![0.0; n];
        let mut r = b.to_vec();
        let mut z: Vec<f64> = r.iter().zip(&diag).map(|(r, d)| r / d).collect();
        let mut p = z.clone();
        let mut rz: f64 = r.iter().zip(&z).map(|(a, b)| a * b).sum();
        let mut ap = vec![0.0; n];
        for _ in 0..max_iter {
            self.apply(&p, &mut ap);
            let pap: f64 = p.iter().zip(&ap).map(|(a, b)| a * b).sum();
            if !(pap > 0.0) {
                return Err(format!("CG direction with nonpositive curvature ({pap:.3e})"));
            }
            let alpha = rz / pap;
            for i in 0..n {
                x[i] += alpha * p[i];
                r[i] -= alpha * ap[i];
            }
            let r_norm = r.iter().map(|v| v * v).sum::<f64>().sqrt();
            if r_norm <= rel_tol * b_norm {
                return Ok(x);
            }
            for i in 0..n {
                z[i] = r[i] / diag[i];
            }
            let rz_new: f64 = r.iter().zip(&z).map(|(a, b)| a * b).sum();
            let beta = rz_new / rz;
            rz = rz_new;
            for i in 0..n {
                p[i] = z[i] + beta * p[i];
            }
        }
        Err(format!(
            "CG did not reach relative residual {rel_tol:.1e} in {max_iter} iterations"
        ))
    }
}
