//! Exact count-over-total ratios and their fixed-precision rendering.
//!
//! Table percentages are kept as integer `count / total` pairs and only turned
//! into text at render time, truncating (never rounding up) at the requested
//! number of decimals. Truncation matches how the feed-analysis tables this
//! crate reproduces print their percentages (e.g. 508/10078 prints as 5.040,
//! 16/488 as 3.27).

use serde::{Deserialize, Serialize};

/// An exact `count / total` ratio.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Share {
    pub count: u64,
    pub total: u64,
}

impl Share {
    pub fn new(count: u64, total: u64) -> Self {
        Share { count, total }
    }

    /// The ratio as a percentage in [0, 100].
    pub fn percent(&self) -> f64 {
        if self.total == 0 {
            0.0
        } else {
            self.count as f64 / self.total as f64 * 100.0
        }
    }

    /// Percentage rendered with `decimals` digits, truncated.
    pub fn format_percent(&self, decimals: u32) -> String {
        format_percent_trunc(self.count, self.total, decimals)
    }
}

/// `count / total * 100` rendered with `decimals` digits, truncated toward
/// zero. All arithmetic is exact.
pub fn format_percent_trunc(count: u64, total: u64, decimals: u32) -> String {
    if total == 0 {
        return format_scaled(0, decimals);
    }
    let scale = 10u128.pow(decimals);
    let scaled = count as u128 * 100 * scale / total as u128;
    format_scaled(scaled, decimals)
}

/// `sum / count` rendered with `decimals` digits, truncated toward zero.
pub fn format_mean_trunc(sum: u64, count: u64, decimals: u32) -> String {
    if count == 0 {
        return format_scaled(0, decimals);
    }
    let scale = 10u128.pow(decimals);
    let scaled = sum as u128 * scale / count as u128;
    format_scaled(scaled, decimals)
}

fn format_scaled(scaled: u128, decimals: u32) -> String {
    if decimals == 0 {
        return scaled.to_string();
    }
    let scale = 10u128.pow(decimals);
    format!(
        "{}.{:0width$}",
        scaled / scale,
        scaled % scale,
        width = decimals as usize
    )
}
