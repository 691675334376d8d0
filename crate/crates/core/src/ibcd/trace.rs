use std::fmt::Write;

use crate::scalar::Real;

/// Per-iteration record of a descent run. Entry 0 is the starting point.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct ConvergenceTrace<T> {
    pub rates_nats: Vec<T>,
    pub rates_bits: Vec<T>,
    /// Total transmit power, watts.
    pub power_used: Vec<T>,
    /// Harvested power minus `P_E`, watts.
    pub eh_margin: Vec<T>,
    /// Artificial-noise power `Tr(V_E V_E^H)`; empty without noise.
    pub an_power: Vec<T>,
    /// Multipliers of the last subproblem.
    pub lambda: T,
    pub mu: T,
    pub converged: bool,
}

impl<T: Real> ConvergenceTrace<T> {
    pub(crate) fn push(&mut self, rate_nats: T, power: T, eh_margin: T) {
        self.rates_nats.push(rate_nats);
        self.rates_bits.push(rate_nats / T::LN_2());
        self.power_used.push(power);
        self.eh_margin.push(eh_margin);
    }

    /// Number of completed iterations (entries after the start).
    pub fn iterations(&self) -> usize {
        self.rates_nats.len().saturating_sub(1)
    }

    pub fn final_rate_bits(&self) -> T {
        self.rates_bits.last().copied().unwrap_or_else(T::zero)
    }

    /// Largest drop between consecutive rates, nats; zero if monotone.
    pub fn max_decrease_nats(&self) -> T {
        self.rates_nats.windows(2).map(|w| w[0] - w[1]).fold(T::zero(), T::max)
    }

    /// Iterates with power above `P_T (1 + 1e-8)` or harvested power below
    /// `P_E (1 - 1e-7)`.
    pub fn feasibility_violations(&self, p_t: T, p_e: T) -> usize {
        let p_max = p_t * T::lit(1.0 + 1e-8);
        let slack = -p_e * T::lit(1e-7);
        self.power_used
            .iter()
            .zip(&self.eh_margin)
            .filter(|&(&p, &m)| p > p_max || m < slack)
            .count()
    }

    /// CSV with header `iter,rate_bits,power_w,eh_margin_w` plus
    /// `an_power_w` when noise powers were recorded.
    pub fn to_csv(&self) -> String {
        let with_an = !self.an_power.is_empty();
        let mut out = String::from("iter,rate_bits,power_w,eh_margin_w");
        if with_an {
            out.push_str(",an_power_w");
        }
        out.push('\n');
        for i in 0..self.rates_bits.len() {
            let _ = write!(
                out,
                "{i},{:e},{:e},{:e}",
                self.rates_bits[i].as_f64(),
                self.power_used[i].as_f64(),
                self.eh_margin[i].as_f64()
            );
            if with_an {
                let _ = write!(out, ",{:e}", self.an_power[i].as_f64());
            }
            out.push('\n');
        }
        out
    }
}
