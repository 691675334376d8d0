use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matcore::ComplexMatrix;
use crate::scalar::Real;

use super::{dbm_to_watts, watts_to_dbm, ChannelPair};

/// `{"rows", "cols", "re": [[..]], "im": [[..]]}`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MatrixJson {
    pub rows: usize,
    pub cols: usize,
    pub re: Vec<Vec<f64>>,
    pub im: Vec<Vec<f64>>,
}

impl MatrixJson {
    pub fn from_matrix<T: Real>(m: &ComplexMatrix<T>) -> Self {
        let (rows, cols) = m.shape();
        let part = |f: fn(&num_complex::Complex<T>) -> T| {
            (0..rows)
                .map(|i| (0..cols).map(|j| f(&m[(i, j)]).as_f64()).collect())
                .collect()
        };
        Self {
            rows,
            cols,
            re: part(|z| z.re),
            im: part(|z| z.im),
        }
    }

    pub fn to_matrix<T: Real>(&self) -> Result<ComplexMatrix<T>> {
        let shape_ok = |p: &Vec<Vec<f64>>| p.len() == self.rows && p.iter().all(|r| r.len() == self.cols);
        if !shape_ok(&self.re) || !shape_ok(&self.im) {
            return Err(Error::Dimension(format!(
                "matrix body does not match declared shape {}x{}",
                self.rows, self.cols
            )));
        }
        let cast =
            |p: &Vec<Vec<f64>>| -> Vec<Vec<T>> { p.iter().map(|r| r.iter().map(|&x| T::lit(x)).collect()).collect() };
        let m = ComplexMatrix::from_parts(&cast(&self.re), &cast(&self.im))?;
        m.ensure_finite("matrix file")?;
        Ok(m)
    }
}

/// Channel file: raw channels, noise powers in dBm, conversion efficiency.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ChannelPairJson {
    pub h_i: MatrixJson,
    pub h_e: MatrixJson,
    pub sigma2_i_dbm: f64,
    pub sigma2_e_dbm: f64,
    pub zeta: f64,
}

impl ChannelPairJson {
    pub fn from_channel<T: Real>(ch: &ChannelPair<T>) -> Self {
        Self {
            h_i: MatrixJson::from_matrix(ch.h_i_raw()),
            h_e: MatrixJson::from_matrix(ch.h_e_raw()),
            sigma2_i_dbm: watts_to_dbm(ch.sigma2_i()).as_f64(),
            sigma2_e_dbm: watts_to_dbm(ch.sigma2_e()).as_f64(),
            zeta: ch.zeta().as_f64(),
        }
    }

    pub fn to_channel<T: Real>(&self) -> Result<ChannelPair<T>> {
        ChannelPair::new(
            self.h_i.to_matrix()?,
            self.h_e.to_matrix()?,
            dbm_to_watts(T::lit(self.sigma2_i_dbm)),
            dbm_to_watts(T::lit(self.sigma2_e_dbm)),
            T::lit(self.zeta),
        )
    }
}
