pub mod batch;
pub mod export;
pub mod replay;
pub mod scenarios;
pub mod serve;
pub mod validate;
