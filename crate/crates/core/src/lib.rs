pub mod ast;
pub mod constraint;
pub mod corpus;
pub mod examples;
pub mod ltp;
pub mod matcher;
pub mod repair;
pub mod template;
