use serde::{Deserialize, Serialize};

/// Elo parameters. Every agent starts at `initial`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RatingConfig {
    pub initial: f64,
    pub k: f64,
    pub scale: f64,
}

impl Default for RatingConfig {
    fn default() -> Self {
        RatingConfig {
            initial: 600.0,
            k: 32.0,
            scale: 400.0,
        }
    }
}

impl RatingConfig {
    pub fn validate(&self) -> Result<(), String> {
        if !(self.initial > 0.0 && self.scale > 0.0 && self.k >= 0.0) {
            return Err("initial rating and scale must be positive, k non-negative".into());
        }
        Ok(())
    }
}

/// Expected score of a player rated `ra` against one rated `rb`.
pub fn expected_score(ra: f64, rb: f64, scale: f64) -> f64 {
    1.0 / (1.0 + 10f64.powf((rb - ra) / scale))
}

/// New ratings after one game; `score_a` is 1 for a win by `a`, 0.5 for a
/// draw and 0 for a loss.
pub fn elo_update(ra: f64, rb: f64, score_a: f64, config: &RatingConfig) -> (f64, f64) {
    let ea = expected_score(ra, rb, config.scale);
    let delta = config.k * (score_a - ea);
    (ra + delta, rb - delta)
}

/// Applies games `(a, b, score_a)` in the given order to `n` players.
pub fn update_ratings(
    n: usize,
    games: impl IntoIterator<Item = (usize, usize, f64)>,
    config: &RatingConfig,
) -> Vec<f64> {
    let mut r = vec![config.initial; n];
    for (a, b, s) in games {
        let (ra, rb) = elo_update(r[a], r[b], s, config);
        r[a] = ra;
        r[b] = rb;
    }
    r
}
