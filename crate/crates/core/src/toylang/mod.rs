//! A small C-like imperative language: parser, AST, program functions and an
//! interpreter.

mod ast;
mod denote;
mod eval;
mod parser;

pub use ast::{
    enclosing_statement, replace_expr, visit_exprs, ArithOp, CmpOp, Cond, Expr, ExprCtx, Ident,
    Program, Stmt, Target,
};
pub use denote::{denote, denote_capped, denote_program, partition};
pub use eval::{default_fuel, exec_mode_function, execute, Executable, Fault, Mode, Outcome, Predicate};
pub use parser::{parse, parse_cond, parse_expr, parse_stmt};
