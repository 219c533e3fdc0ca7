//! Influencer advertising-disclosure audit.
//!
//! The pipeline loads a post corpus, labels each post English, Dutch, or
//! Other, classifies disclosures (green, yellow, none) and affiliate
//! marketing, and aggregates the findings into report tables and plot data.

pub mod analytics;
pub mod corpus;
pub mod ingest;
pub mod langid;
pub mod report;
pub mod rules;
pub mod synth;
