//! Deadline-enforced matches, round-robin cross-play and Elo ratings.

mod play;
mod rating;
mod spec;
mod table;

pub use play::{play_agents, play_match, LossCause, MatchRecord, MatchResult, TimeControl};
pub use rating::{elo_update, expected_score, update_ratings, RatingConfig};
pub use spec::{AgentInfo, AgentSpec, ParamInfo, SpecError};
pub use table::{labels, round_robin, round_robin_with, schedule, Cell, CrossPlayTable, Pairing, Tournament};
