//! Trace files.
//!
//! One trace per line, steps separated by `;`, propositions within a step
//! by `,`. A step written `.` or left blank is empty. Blank lines and
//! lines starting with `#` are skipped. A line `@aps a b c` declares
//! propositions that may not occur in the formula; it must precede the
//! first trace.
//!
//! ```text
//! @aps s d r
//! s;r;r
//! s;d;r
//! ```

use std::io::{self, BufRead, Write};

use somon_core::ap::ApError;
use somon_core::{ApSet, ApUniverse};
use thiserror::Error;

pub const APS_DIRECTIVE: &str = "@aps";

#[derive(Debug, Error)]
pub enum TraceFileError {
    #[error("{0}")]
    Io(#[from] io::Error),
    #[error("line {line}: {source}")]
    Ap { line: usize, source: ApError },
    #[error("line {line}: {APS_DIRECTIVE} must precede the first trace")]
    LateDirective { line: usize },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Entry {
    Aps(Vec<String>),
    Trace { line: usize, text: String },
}

/// Meaningful lines of a trace file, numbered from 1.
pub fn entries<R: BufRead>(reader: R) -> impl Iterator<Item = Result<Entry, TraceFileError>> {
    let mut seen_trace = false;
    reader.lines().enumerate().filter_map(move |(k, line)| {
        let line = match line {
            Ok(l) => l,
            Err(e) => return Some(Err(e.into())),
        };
        let text = line.trim();
        if text.is_empty() || text.starts_with('#') {
            return None;
        }
        if let Some(rest) = text.strip_prefix(APS_DIRECTIVE) {
            if seen_trace {
                return Some(Err(TraceFileError::LateDirective { line: k + 1 }));
            }
            let names = rest.split([' ', '\t', ',']).filter(|s| !s.is_empty()).map(String::from);
            return Some(Ok(Entry::Aps(names.collect())));
        }
        seen_trace = true;
        Some(Ok(Entry::Trace {
            line: k + 1,
            text: text.to_string(),
        }))
    })
}

fn step_names(step: &str) -> impl Iterator<Item = &str> {
    let step = step.trim();
    let step = if step == "." { "" } else { step };
    step.split(',').map(str::trim).filter(|s| !s.is_empty())
}

/// Proposition names used in a trace line, in order of appearance.
pub fn names(text: &str) -> impl Iterator<Item = &str> {
    text.split(';').flat_map(step_names)
}

pub fn parse_trace(universe: &ApUniverse, text: &str) -> Result<Vec<ApSet>, ApError> {
    text.split(';')
        .map(|step| {
            let names: Vec<&str> = step_names(step).collect();
            universe.letter(&names)
        })
        .collect()
}

pub fn format_trace(universe: &ApUniverse, trace: &[ApSet]) -> String {
    let steps: Vec<String> = trace
        .iter()
        .map(|s| {
            if s.is_empty() {
                ".".to_string()
            } else {
                universe.display_letter(*s).to_string()
            }
        })
        .collect();
    steps.join(";")
}

/// Writes an `@aps` line followed by one trace per line.
pub fn write_traces<W: Write>(mut w: W, universe: &ApUniverse, traces: &[Vec<ApSet>]) -> io::Result<()> {
    let aps: Vec<&str> = universe.aps().map(|a| universe.name(a)).collect();
    writeln!(w, "{APS_DIRECTIVE} {}", aps.join(" "))?;
    for t in traces {
        writeln!(w, "{}", format_trace(universe, t))?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reads_directives_traces_and_comments() {
        let text = "# comment\n@aps s d, r\n\ns;r;r\n  s;.;r  \n";
        let got: Vec<Entry> = entries(text.as_bytes()).map(Result::unwrap).collect();
        assert_eq!(
            got,
            [
                Entry::Aps(vec!["s".into(), "d".into(), "r".into()]),
                Entry::Trace {
                    line: 4,
                    text: "s;r;r".into()
                },
                Entry::Trace {
                    line: 5,
                    text: "s;.;r".into()
                },
            ]
        );
    }

    #[test]
    fn late_directive_is_rejected() {
        let got: Vec<_> = entries("a\n@aps b\n".as_bytes()).collect();
        assert!(matches!(got[1], Err(TraceFileError::LateDirective { line: 2 })));
    }

    #[test]
    fn traces_round_trip() {
        let u = ApUniverse::from_names(["a", "b"]).unwrap();
        for text in [".", "a,b;.;b", ".;."] {
            let t = parse_trace(&u, text).unwrap();
            assert_eq!(format_trace(&u, &t), text);
        }
        assert_eq!(parse_trace(&u, ";").unwrap().len(), 2);
        assert!(parse_trace(&u, "a;z").is_err());
        assert_eq!(names("a,b;.;c").collect::<Vec<_>>(), ["a", "b", "c"]);
    }

    #[test]
    fn written_files_read_back() {
        let u = ApUniverse::from_names(["s", "d", "r"]).unwrap();
        let traces = vec![u.word("s;r").unwrap(), u.word(";").unwrap()];
        let mut out = Vec::new();
        write_traces(&mut out, &u, &traces).unwrap();
        let text = String::from_utf8(out).unwrap();
        assert_eq!(text, "@aps s d r\ns;r\n.;.\n");
        let back: Vec<_> = entries(text.as_bytes())
            .filter_map(|e| match e.unwrap() {
                Entry::Trace { text, .. } => Some(parse_trace(&u, &text).unwrap()),
                Entry::Aps(_) => None,
            })
            .collect();
        assert_eq!(back, traces);
    }
}
