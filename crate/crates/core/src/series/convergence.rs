use serde::Serialize;

use super::{f_single_with, SeriesTruncation};
use crate::charfn::{CharFnOptions, SeriesOrder};
use crate::error::Result;
use crate::fourier::{w_price_with, QuadratureSpec};
use crate::model::{AssetParams, MarketState, RateParams};

/// Partial sum after `index` (diagonal index, or power-series terms).
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ConvergenceRow {
    pub index: usize,
    pub partial_sum: f64,
    /// `|S_index − S_{index−1}|`, with the empty sum taken as `0`.
    pub abs_diff: f64,
}

/// Which truncation a convergence study walks.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Study {
    /// `W` with the characteristic-function power series cut at order
    /// `index` (`â_0..â_index`), `index = 0..=max_terms`.
    PowerSeries,
    /// `F` with the jump series cut at `l, n ≤ index`, `index = 0..=max_terms`.
    JumpSeries,
}

pub fn convergence_study(
    study: Study,
    rate: &RateParams,
    asset: &AssetParams,
    state: &MarketState,
    max_terms: usize,
    spec: &QuadratureSpec,
) -> Result<Vec<ConvergenceRow>> {
    match study {
        Study::PowerSeries => {
            let mut rows = Vec::with_capacity(max_terms + 1);
            let mut prev = 0.0;
            for index in 0..=max_terms {
                let opts = CharFnOptions {
                    order: SeriesOrder::Fixed(index),
                    ..CharFnOptions::default()
                };
                let w = w_price_with(rate, asset, state, spec, &opts)?.value;
                rows.push(ConvergenceRow {
                    index,
                    partial_sum: w,
                    abs_diff: (w - prev).abs(),
                });
                prev = w;
            }
            Ok(rows)
        }
        Study::JumpSeries => {
            let trunc = SeriesTruncation::square(max_terms);
            let (_, report) =
                f_single_with(rate, asset, state, &trunc, spec, &CharFnOptions::default())?;
            let mut rows = report.rows;
            rows.truncate(max_terms + 1);
            Ok(rows)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::reference;

    #[test]
    fn first_row_is_the_leading_weighted_term() {
        let rows = convergence_study(
            Study::JumpSeries,
            &reference::rate(),
            &reference::asset(),
            &reference::market(),
            3,
            &QuadratureSpec::default(),
        )
        .unwrap();
        assert_eq!(rows.len(), 4);
        assert_eq!(rows[0].abs_diff, rows[0].partial_sum);
        for w in rows.windows(2) {
            assert!((w[1].abs_diff - (w[1].partial_sum - w[0].partial_sum).abs()).abs() < 1e-15);
        }
    }
}
