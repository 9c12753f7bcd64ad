//! Drives monitors over trace streams, times each arrival and writes CSV.

use std::io::{self, Write};
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;
use std::time::Instant;

use somon_core::{ApSet, Counters, Formula, LengthPolicy, Monitor, MonitorError, Options, Verdict};

pub const CSV_COLUMNS: [&str; 8] = [
    "arrival_index",
    "verdict",
    "check_calls",
    "step_checks",
    "sat_hits",
    "fix_seeds",
    "wit_hits",
    "elapsed_ms",
];

#[derive(Clone, Debug, PartialEq)]
pub struct Row {
    pub arrival: usize,
    pub verdict: Verdict,
    /// Counters of this arrival alone.
    pub counters: Counters,
    pub elapsed_ms: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Run {
    pub instance: String,
    pub traces: usize,
    pub rows: Vec<Row>,
    pub verdict: Verdict,
    pub last_check: bool,
    /// Cumulative counters.
    pub counters: Counters,
    pub elapsed_ms: f64,
    /// Extra `key=value` pairs for the summary line.
    pub notes: Vec<(String, String)>,
}

impl Run {
    /// Arrivals consumed before the verdict, or the whole stream.
    pub fn arrivals(&self) -> usize {
        self.rows.len()
    }

    pub fn summary(&self, deterministic: bool) -> String {
        let c = self.counters;
        let mut line = format!(
            "instance={} traces={} arrivals={} verdict={} last_check={} check_calls={} step_checks={} sat_hits={} fix_seeds={} wit_hits={} elapsed_ms={}",
            self.instance,
            self.traces,
            self.arrivals(),
            self.verdict,
            self.last_check,
            c.check_calls,
            c.step_checks,
            c.sat_hits,
            c.fix_seeds,
            c.wit_hits,
            millis(self.elapsed_ms, deterministic),
        );
        for (k, v) in &self.notes {
            line.push_str(&format!(" {k}={v}"));
        }
        line
    }
}

fn millis(ms: f64, deterministic: bool) -> String {
    if deterministic {
        "0".into()
    } else {
        format!("{ms:.3}")
    }
}

/// Feeds `stream` until a final verdict or its end.
pub fn run_stream(
    instance: impl Into<String>,
    formula: Formula,
    stream: &[Vec<ApSet>],
    policy: LengthPolicy,
    options: Options,
) -> Result<Run, MonitorError> {
    let start = Instant::now();
    let mut monitor = Monitor::new(formula, policy, options);
    let mut rows = Vec::new();
    let mut before = Counters::default();
    for trace in stream {
        let t = Instant::now();
        let verdict = monitor.feed(trace)?;
        let counters = monitor.counters();
        rows.push(Row {
            arrival: rows.len() + 1,
            verdict,
            counters: counters - before,
            elapsed_ms: t.elapsed().as_secs_f64() * 1e3,
        });
        before = counters;
        if verdict.is_final() {
            break;
        }
    }
    let report = monitor.finish()?;
    Ok(Run {
        instance: instance.into(),
        traces: stream.len(),
        rows,
        verdict: report.verdict,
        last_check: report.last_check,
        counters: monitor.counters(),
        elapsed_ms: start.elapsed().as_secs_f64() * 1e3,
        notes: Vec::new(),
    })
}

/// Writes the rows of `runs`; with `instance` set, a leading column names
/// the run.
pub fn write_csv<W: Write>(mut w: W, runs: &[Run], instance: bool, deterministic: bool) -> io::Result<()> {
    if instance {
        write!(w, "instance,")?;
    }
    writeln!(w, "{}", CSV_COLUMNS.join(","))?;
    for run in runs {
        for row in &run.rows {
            if instance {
                write!(w, "{},", run.instance)?;
            }
            let c = row.counters;
            writeln!(
                w,
                "{},{},{},{},{},{},{},{}",
                row.arrival,
                row.verdict,
                c.check_calls,
                c.step_checks,
                c.sat_hits,
                c.fix_seeds,
                c.wit_hits,
                millis(row.elapsed_ms, deterministic)
            )?;
        }
    }
    Ok(())
}

pub type Job<T> = Box<dyn FnOnce() -> T + Send>;

/// Runs `jobs` on up to `threads` threads; results keep the job order.
pub fn parallel<T: Send>(jobs: Vec<Job<T>>, threads: usize) -> Vec<T> {
    let n = jobs.len();
    let queue: Vec<Mutex<Option<Job<T>>>> = jobs.into_iter().map(|j| Mutex::new(Some(j))).collect();
    let results: Vec<Mutex<Option<T>>> = (0..n).map(|_| Mutex::new(None)).collect();
    let next = AtomicUsize::new(0);
    std::thread::scope(|s| {
        for _ in 0..threads.clamp(1, n.max(1)) {
            s.spawn(|| loop {
                let k = next.fetch_add(1, Ordering::Relaxed);
                if k >= n {
                    break;
                }
                let job = queue[k].lock().unwrap().take().expect("each job runs once");
                *results[k].lock().unwrap() = Some(job());
            });
        }
    });
    results
        .into_iter()
        .map(|r| r.into_inner().unwrap().expect("every job ran"))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use somon_core::bench::{self, sender_receiver};

    #[test]
    fn ck_run_stops_at_unsat() {
        let u = sender_receiver::universe();
        let f = bench::build(sender_receiver::CK, &u);
        let stream = sender_receiver::traces(3);
        let run = run_stream("m=3", f, &stream, LengthPolicy::Pad, Options::all()).unwrap();
        assert_eq!(run.verdict, Verdict::Unsat);
        assert_eq!(run.traces, 5);
        let total: u64 = run.rows.iter().map(|r| r.counters.check_calls).sum();
        assert_eq!(total, run.counters.check_calls);
        let mut csv = Vec::new();
        write_csv(&mut csv, std::slice::from_ref(&run), true, true).unwrap();
        let csv = String::from_utf8(csv).unwrap();
        assert!(csv.starts_with("instance,arrival_index,verdict,"));
        assert_eq!(csv.lines().count(), 1 + run.arrivals());
        assert!(csv.lines().skip(1).all(|l| l.starts_with("m=3,") && l.ends_with(",0")));
        assert!(run.summary(true).contains("verdict=unsat"));
    }

    #[test]
    fn parallel_keeps_order() {
        let jobs: Vec<Job<usize>> = (0..20usize).map(|k| Box::new(move || k * k) as Job<usize>).collect();
        assert_eq!(parallel(jobs, 4), (0..20usize).map(|k| k * k).collect::<Vec<_>>());
        assert!(parallel(Vec::<Job<u8>>::new(), 3).is_empty());
    }
}
