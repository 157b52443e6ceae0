//! Configuration-driven experiment runner over the hole-burning library:
//! JSON configs in, JSON reports and plot-ready CSV tables out.

pub mod config;
pub mod report;
pub mod runner;
