use std::io::Write;

use anyhow::{Context, Result};
use qpgame_core::solver::{NoProgress, SearchOptions};
use qpgame_core::tables::{generate_tables, AnswerTables, GENERATE_DEFAULT_LIMIT};

use crate::args::{TablesGenerateArgs, TablesValidateArgs};

pub fn generate(args: &TablesGenerateArgs, out: &mut dyn Write) -> Result<()> {
    let limit = if args.allow_large { usize::MAX } else { GENERATE_DEFAULT_LIMIT };
    let tables = generate_tables(args.n, &SearchOptions::unrestricted(), limit, NoProgress)
        .with_context(|| format!("generating tables for n = {}", args.n))?;
    let violations = tables.validate();
    if !violations.is_empty() {
        anyhow::bail!("generated tables fail validation: {}", violations[0]);
    }
    tables.save(&args.out).with_context(|| format!("writing {}", args.out.display()))?;
    writeln!(
        out,
        "Wrote {}: n = {}, {} sub-tables, {} first moves left to check at the root.",
        args.out.display(),
        tables.n(),
        tables.sub_table_count(),
        tables.round1_actual_checks(),
    )?;
    Ok(())
}

/// Prints one line per violation; returns how many were found.
pub fn validate(args: &TablesValidateArgs, out: &mut dyn Write) -> Result<usize> {
    let tables = AnswerTables::load(&args.input).with_context(|| format!("reading {}", args.input.display()))?;
    let violations = tables.validate();
    for v in &violations {
        writeln!(out, "{v}")?;
    }
    if violations.is_empty() {
        writeln!(out, "{}: no violations (n = {}).", args.input.display(), tables.n())?;
    }
    Ok(violations.len())
}
