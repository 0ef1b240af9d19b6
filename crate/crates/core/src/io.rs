//! JSON instance and schedule files, CSV convergence traces.

use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::engine::{SolveResult, TraceRecord};
use crate::model::{validate_instance, Schedule, UcInstance};
use crate::{Result, UcError};

pub const TRACE_HEADER: [&str; 7] = ["k", "rho", "rd_l1", "rd_linf", "aug_obj", "true_obj", "ms"];

/// Schedule file contents: the schedule plus a summary of the run that produced it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScheduleDocument {
    pub objective: f64,
    pub converged: bool,
    pub iterations: usize,
    pub rd_l1: f64,
    pub rd_linf: f64,
    pub schedule: Schedule,
}

impl From<&SolveResult> for ScheduleDocument {
    fn from(r: &SolveResult) -> Self {
        ScheduleDocument {
            objective: r.objective,
            converged: r.converged,
            iterations: r.iterations,
            rd_l1: r.rd_l1,
            rd_linf: r.rd_linf,
            schedule: r.schedule.clone(),
        }
    }
}

/// Parses and validates an instance.
pub fn load_instance(source: impl Read) -> Result<UcInstance> {
    let inst: UcInstance = serde_json::from_reader(source)?;
    let report = validate_instance(&inst);
    if !report.is_valid() {
        return Err(UcError::Validation(report));
    }
    Ok(inst)
}

pub fn load_instance_path(path: impl AsRef<Path>) -> Result<UcInstance> {
    load_instance(BufReader::new(File::open(path)?))
}

pub fn write_instance(inst: &UcInstance, out: impl Write) -> Result<()> {
    write_json(inst, out)
}

pub fn save_instance(inst: &UcInstance, path: impl AsRef<Path>) -> Result<()> {
    write_json(inst, BufWriter::new(File::create(path)?))
}

fn write_json<T: Serialize>(value: &T, mut out: impl Write) -> Result<()> {
    // serde_json prints the shortest representation that parses back to the
    // same f64, so files round-trip exactly
    serde_json::to_writer_pretty(&mut out, value)?;
    out.write_all(b"\n")?;
    out.flush()?;
    Ok(())
}

/// Writes the trace as CSV. The header is written even for an empty trace.
pub fn write_trace(trace: &[TraceRecord], out: impl Write) -> Result<()> {
    let mut w = csv::WriterBuilder::new()
        .has_headers(false)
        .from_writer(out);
    w.write_record(TRACE_HEADER)?;
    for r in trace {
        w.serialize(r)?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_trace(source: impl Read) -> Result<Vec<TraceRecord>> {
    let mut r = csv::Reader::from_reader(source);
    r.deserialize().map(|x| x.map_err(UcError::from)).collect()
}

/// Writes the schedule document as JSON and the trace as CSV.
pub fn save_results(
    result: &SolveResult,
    schedule_path: impl AsRef<Path>,
    trace_path: impl AsRef<Path>,
) -> Result<()> {
    write_json(
        &ScheduleDocument::from(result),
        BufWriter::new(File::create(schedule_path)?),
    )?;
    write_trace(&result.trace, BufWriter::new(File::create(trace_path)?))
}

pub fn load_schedule(path: impl AsRef<Path>) -> Result<ScheduleDocument> {
    Ok(serde_json::from_reader(BufReader::new(File::open(path)?))?)
}

#[cfg(test)]
mod tests {
    use super::*;

    const MINIMAL: &str = r#"{
        "horizon": 2,
        "nodes": [{"id": "n0", "demand": [50.0, 60.0]}],
        "generators": [{
            "id": "g0", "node": "n0", "p_min": 10, "p_max": 100,
            "a": 10, "b": 2, "c": 0.01, "start_cost": 40,
            "ramp_up": 50, "ramp_down": 50, "startup_limit": 60, "shutdown_limit": 60,
            "min_uptime": 1, "min_downtime": 1
        }]
    }"#;

    fn record(k: usize) -> TraceRecord {
        TraceRecord {
            k,
            rho: 1e-4 * 1.1f64.powi(k as i32),
            rd_l1: 0.1 / 3.0,
            rd_linf: 1.0 / 7.0,
            aug_obj: 12345.678901234567,
            true_obj: -0.0,
            ms: 0.0,
        }
    }

    #[test]
    fn minimal_document_loads() {
        let inst = load_instance(MINIMAL.as_bytes()).unwrap();
        assert_eq!(inst.horizon, 2);
        assert!(inst.storage.is_empty());
    }

    #[test]
    fn missing_field_is_named() {
        let doc = MINIMAL.replace(r#""demand": [50.0, 60.0]"#, r#""x": 1"#);
        match load_instance(doc.as_bytes()) {
            Err(UcError::Parse { message, line, .. }) => {
                assert!(message.contains("demand"), "{message}");
                assert!(line > 0);
            }
            other => panic!("expected parse error, got {other:?}"),
        }
    }

    #[test]
    fn short_series_fails_validation() {
        let doc = MINIMAL.replace("[50.0, 60.0]", "[50.0]");
        assert!(matches!(
            load_instance(doc.as_bytes()),
            Err(UcError::Validation(_))
        ));
    }

    #[test]
    fn trace_has_header_plus_one_line_per_record() {
        let mut buf = Vec::new();
        write_trace(&[record(1), record(2), record(3)], &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(text.lines().count(), 4);
        assert_eq!(
            text.lines().next().unwrap(),
            "k,rho,rd_l1,rd_linf,aug_obj,true_obj,ms"
        );
        let back = read_trace(text.as_bytes()).unwrap();
        assert_eq!(back, vec![record(1), record(2), record(3)]);
    }

    #[test]
    fn empty_trace_is_header_only() {
        let mut buf = Vec::new();
        write_trace(&[], &mut buf).unwrap();
        assert_eq!(
            String::from_utf8(buf).unwrap(),
            "k,rho,rd_l1,rd_linf,aug_obj,true_obj,ms\n"
        );
    }
}
