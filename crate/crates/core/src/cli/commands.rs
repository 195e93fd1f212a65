use std::collections::{BTreeMap, BTreeSet};
use std::io::Write;
use std::path::{Path, PathBuf};

use super::output::{slug, OutputDir, OutputKey};
use super::rows::{delimited, json_lines, Row};
use super::*;
use crate::corpus::{
    compute_stats, length_label_correlation, read_records_str, read_texts, records_to_string, LabelRecord,
    RecordKind, TextRecord,
};
use crate::grouping::{load_partition, Grouper, GroupingStrategy, PartitionRegistry};
use crate::llmclient::{
    expand_labels, group_labels, partition_document, DecodeSettings, EndpointConfig, ExpansionKind, HttpProvider,
    LlmClient, LlmError, Mode, ResponseCache, DEFAULT_MODEL,
};
use crate::metrics::{
    agreement_matrix, aggregate_runs, basic_emotions, evaluate_corpus, m_avg, pearson, random_baseline,
    score_text_corpus, Annotation, CorpusReport, ScoreTable, TextScores,
};
use crate::par::Execution;
use crate::taxonomy::{build_bundle, builtin_bundle, Label, TaxonomyBundle};

type Tables = Vec<(&'static str, Vec<Row>)>;

pub fn dispatch(cli: &Cli, stdout: &mut dyn Write) -> Result<(), CliError> {
    let ctx = Ctx { cli, exec: if cli.sequential { Execution::Sequential } else { Execution::default() } };
    let (dir, tables) = match &cli.command {
        Command::Evaluate(a) => ctx.evaluate(a)?,
        Command::Grouping(GroupingCommand::Build(a)) => ctx.build(a)?,
        Command::Grouping(GroupingCommand::Partition(a)) => ctx.partition(a)?,
        Command::Grouping(GroupingCommand::Trace(a)) => ctx.trace(a)?,
        Command::Expand(a) => ctx.expand(a)?,
        Command::Correlate(a) => ctx.correlate(a)?,
        Command::Agreement(a) => ctx.agreement(a)?,
        Command::Stats(a) => ctx.stats(a)?,
        Command::Baseline(a) => ctx.baseline(a)?,
        Command::Textmetrics(a) => ctx.textmetrics(a)?,
    };
    let mut shown = String::new();
    for (i, (name, rows)) in tables.iter().enumerate() {
        let (text, ext) = match cli.format {
            Format::JsonLines => (json_lines(rows), "jsonl"),
            Format::Delimited => (delimited(rows), "csv"),
        };
        dir.write(&format!("{name}.{ext}"), &text)?;
        if cli.format == Format::Delimited && i > 0 {
            shown.push('\n');
        }
        shown.push_str(&text);
    }
    stdout.write_all(shown.as_bytes()).map_err(|e| CliError::io(Path::new("<stdout>"), e))?;
    log::info!("{}", serde_json::json!({"event": "wrote", "dir": dir.path().display().to_string()}));
    Ok(())
}

struct Ctx<'a> {
    cli: &'a Cli,
    exec: Execution,
}

fn read_text(path: &Path) -> Result<String, CliError> {
    std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))
}

fn records(path: &Path, kind: RecordKind, key: &mut OutputKey) -> Result<Vec<LabelRecord>, CliError> {
    let text = read_text(path)?;
    key.add_str(&text);
    read_records_str(&text, kind).map_err(|e| CliError::from(e).in_file(path))
}

fn texts(path: &Path, key: &mut OutputKey) -> Result<Vec<TextRecord>, CliError> {
    let text = read_text(path)?;
    key.add_str(&text);
    read_texts(text.as_bytes()).map_err(|e| CliError::from(e).in_file(path))
}

fn stem(path: &Path) -> String {
    path.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_else(|| "input".into())
}

/// Distinct display names for a list of files.
fn run_names(paths: &[PathBuf]) -> Vec<String> {
    let stems: Vec<String> = paths.iter().map(|p| stem(p)).collect();
    stems
        .iter()
        .enumerate()
        .map(|(i, s)| if stems.iter().filter(|t| *t == s).count() > 1 { format!("{s}-{}", i + 1) } else { s.clone() })
        .collect()
}

fn split_named(spec: &str) -> Result<(String, PathBuf), CliError> {
    match spec.split_once('=') {
        Some((name, file)) if !name.is_empty() && !file.is_empty() => Ok((name.to_string(), PathBuf::from(file))),
        _ => Err(CliError::usage(format!("expected NAME=FILE, got {spec:?}"))),
    }
}

fn load_partitions(specs: &[String], key: &mut OutputKey) -> Result<PartitionRegistry, CliError> {
    let mut reg = PartitionRegistry::new();
    for spec in specs {
        let (name, path) = split_named(spec)?;
        let text = read_text(&path)?;
        key.add_str(&name).add_str(&text);
        let partition = load_partition(&text).map_err(|e| CliError::from(e).in_file(&path))?;
        if reg.insert(name.clone(), partition).is_some() {
            return Err(CliError::usage(format!("partition {name:?} given twice")));
        }
    }
    Ok(reg)
}

fn parse_strategies(list: &str, key: &mut OutputKey) -> Result<Vec<GroupingStrategy>, CliError> {
    let strategies = GroupingStrategy::parse_list(list).map_err(|e| CliError::usage(e.to_string()))?;
    for s in &strategies {
        key.add_str(&s.to_string());
    }
    Ok(strategies)
}

fn report_row(run: &str, r: &CorpusReport) -> Row {
    Row::new()
        .with("kind", "report")
        .with("run", run)
        .with("strategy", r.strategy.to_string())
        .with("n_samples", r.n_samples)
        .with("mean_precision", r.mean_precision)
        .with("mean_recall", r.mean_recall)
        .with("mean_f", r.mean_f)
        .with("oov_gt_total", r.oov_gt_total)
        .with("oov_pred_total", r.oov_pred_total)
}

/// M-avg of one run, if the strategy list covers the twelve wheel-based
/// strategies exactly once.
fn run_m_avg(reports: &[CorpusReport]) -> Option<f64> {
    let wheel: BTreeSet<GroupingStrategy> = GroupingStrategy::wheel_based().into_iter().collect();
    let scores: Vec<(GroupingStrategy, f64)> = reports
        .iter()
        .filter(|r| wheel.contains(&r.strategy.slot()))
        .map(|r| (r.strategy.clone(), r.mean_f))
        .collect();
    m_avg(&scores).ok()
}

fn read_label_input(input: &LabelInput, key: &mut OutputKey) -> Result<Vec<Label>, CliError> {
    if input.labels.is_none() && input.from_records.is_none() {
        return Err(CliError::usage("give --labels or --from-records"));
    }
    let mut labels = BTreeSet::new();
    if let Some(path) = &input.labels {
        let text = read_text(path)?;
        key.add_str(&text);
        for (i, line) in text.lines().enumerate() {
            let line = line.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let label = Label::new(line)
                .map_err(|e| CliError::validation(format!("line {}: {e}", i + 1)).in_file(path))?;
            labels.insert(label);
        }
    }
    if let Some(path) = &input.from_records {
        for r in records(path, RecordKind::Prediction, key)? {
            labels.extend(r.labels);
        }
    }
    Ok(labels.into_iter().collect())
}

struct LlmSetup {
    client: LlmClient,
    model: String,
    settings: DecodeSettings,
}

fn llm_setup(a: &LlmArgs, key: &mut OutputKey) -> Result<LlmSetup, CliError> {
    let config = EndpointConfig::load(a.endpoint_config.as_deref())?;
    let model = a.model.clone().or_else(|| config.as_ref().map(|c| c.model.clone())).unwrap_or(DEFAULT_MODEL.into());
    let settings = DecodeSettings { temperature: a.temperature, ..DecodeSettings::default() };
    let cache = ResponseCache::new(&a.cache);
    let client = match a.mode {
        Mode::Replay => LlmClient::replay(cache),
        mode => {
            let config = config.ok_or(LlmError::NotConfigured(mode.name()))?;
            let provider = Box::new(HttpProvider::new(config));
            if mode == Mode::Record {
                LlmClient::record(cache, provider)
            } else {
                LlmClient::live(provider)
            }
        }
    };
    key.add_str(&model).add_str(&a.temperature.to_string()).add_str(&a.cache.display().to_string());
    Ok(LlmSetup { client: client.with_concurrency(a.concurrency), model, settings })
}

impl Ctx<'_> {
    fn key(&self, command: &'static str) -> OutputKey {
        let mut key = OutputKey::new(command);
        key.add_str(match self.cli.format {
            Format::JsonLines => "json-lines",
            Format::Delimited => "delimited",
        });
        key
    }

    fn bundle(&self, key: &mut OutputKey) -> Result<TaxonomyBundle, CliError> {
        let bundle = match &self.cli.bundle {
            Some(path) => TaxonomyBundle::from_json(&read_text(path)?).map_err(|e| CliError::from(e).in_file(path))?,
            None => builtin_bundle(),
        };
        key.add_str(&bundle.to_json());
        Ok(bundle)
    }

    fn evaluate(&self, a: &EvaluateArgs) -> Result<(OutputDir, Tables), CliError> {
        let mut key = self.key("evaluate");
        let strategies = parse_strategies(&a.strategy, &mut key)?;
        let bundle = self.bundle(&mut key)?;
        let partitions = load_partitions(&a.partition, &mut key)?;
        let grouper = Grouper::new(&bundle).with_partitions(&partitions);
        for s in &strategies {
            grouper.check(s)?;
        }
        let gt = records(&a.gt, RecordKind::GroundTruth, &mut key)?;
        let names = run_names(&a.pred);
        let mut runs = Vec::new();
        for (path, name) in a.pred.iter().zip(&names) {
            let pred = records(path, RecordKind::Prediction, &mut key)?;
            let reports = strategies
                .iter()
                .map(|s| evaluate_corpus(&gt, &pred, &grouper, s, self.exec))
                .collect::<Result<Vec<_>, _>>()
                .map_err(|e| CliError::from(e).in_file(path))?;
            runs.push((name.as_str(), reports));
        }
        let dir = key.finish(&self.cli.out)?;

        let mut report_rows = Vec::new();
        let mut mavg_rows = Vec::new();
        for (name, reports) in &runs {
            for r in reports {
                let file = format!("{}.{}", slug(name), slug(&r.strategy.to_string()));
                match self.cli.format {
                    Format::JsonLines => dir.write(&format!("{file}.json"), &r.to_json())?,
                    Format::Delimited => dir.write(&format!("{file}.csv"), &r.to_csv())?,
                };
                report_rows.push(report_row(name, r));
            }
            if let Some(v) = run_m_avg(reports) {
                mavg_rows.push(Row::new().with("kind", "m_avg").with("run", *name).with("m_avg", v));
            }
        }
        let mut tables: Tables = vec![("reports", report_rows)];
        if runs.len() > 1 {
            let mut agg_rows = Vec::new();
            let mut means = Vec::new();
            for (i, s) in strategies.iter().enumerate() {
                let per_run: Vec<CorpusReport> = runs.iter().map(|(_, reps)| reps[i].clone()).collect();
                let agg = aggregate_runs(&per_run)?;
                agg_rows.push(
                    Row::new()
                        .with("kind", "aggregate")
                        .with("strategy", s.to_string())
                        .with("runs", agg.runs)
                        .with("n_samples", agg.n_samples)
                        .with("mean_precision", agg.mean_precision)
                        .with("std_precision", agg.std_precision)
                        .with("mean_recall", agg.mean_recall)
                        .with("std_recall", agg.std_recall)
                        .with("mean_f", agg.mean_f)
                        .with("std_f", agg.std_f),
                );
                means.push(CorpusReport { mean_f: agg.mean_f, ..per_run[0].clone() });
            }
            if let Some(v) = run_m_avg(&means) {
                mavg_rows.push(Row::new().with("kind", "m_avg").with("run", "mean").with("m_avg", v));
            }
            tables.push(("aggregate", agg_rows));
        }
        if !mavg_rows.is_empty() {
            tables.push(("m_avg", mavg_rows));
        }
        Ok((dir, tables))
    }

    fn build(&self, a: &BuildArgs) -> Result<(OutputDir, Tables), CliError> {
        let mut key = self.key("grouping-build");
        key.add_str(&a.taxonomy_version);
        let mut wheels = Vec::new();
        for path in &a.wheel {
            let text = read_text(path)?;
            key.add_str(&text);
            wheels.push(text);
        }
        let mut optional = |p: &Option<PathBuf>| -> Result<String, CliError> {
            let text = match p {
                Some(path) => read_text(path)?,
                None => String::new(),
            };
            key.add_str(&text);
            Ok(text)
        };
        let synonyms = optional(&a.synonyms)?;
        let forms = optional(&a.forms)?;
        let sources: Vec<&str> = wheels.iter().map(String::as_str).collect();
        let bundle = build_bundle(&a.taxonomy_version, &sources, &synonyms, &forms)?;
        let dir = key.finish(&self.cli.out)?;
        dir.write("bundle.json", &bundle.to_json())?;
        let row = Row::new()
            .with("kind", "bundle")
            .with("version", bundle.version())
            .with("wheels", bundle.wheels().count())
            .with("synonym_labels", bundle.synonyms().domain().count())
            .with("form_labels", bundle.forms().domain().count())
            .with("collisions", bundle.collision_log().len())
            .with("file", "bundle.json");
        Ok((dir, vec![("summary", vec![row])]))
    }

    fn partition(&self, a: &PartitionArgs) -> Result<(OutputDir, Tables), CliError> {
        let mut key = self.key("grouping-partition");
        let labels = read_label_input(&a.input, &mut key)?;
        let llm = llm_setup(&a.llm, &mut key)?;
        let groups = group_labels(&labels, &llm.client, &llm.model, &llm.settings)?;
        let doc = partition_document(&groups);
        let partition = load_partition(&doc)?;
        let dir = key.finish(&self.cli.out)?;
        dir.write("partition.json", &doc)?;
        let row = Row::new()
            .with("kind", "partition")
            .with("labels", labels.len())
            .with("groups", partition.len())
            .with("file", "partition.json");
        Ok((dir, vec![("summary", vec![row])]))
    }

    fn trace(&self, a: &TraceArgs) -> Result<(OutputDir, Tables), CliError> {
        let mut key = self.key("grouping-trace");
        let strategies = parse_strategies(&a.strategy, &mut key)?;
        let bundle = self.bundle(&mut key)?;
        let partitions = load_partitions(&a.partition, &mut key)?;
        let grouper = Grouper::new(&bundle).with_partitions(&partitions);
        let mut rows = Vec::new();
        for raw in &a.label {
            key.add_str(raw);
            let label = Label::new(raw).map_err(|e| CliError::usage(e.to_string()))?;
            for s in &strategies {
                let (group, oov) = grouper.group_label(s, &label)?;
                rows.push(
                    Row::new()
                        .with("label", label.as_str())
                        .with("strategy", s.to_string())
                        .with("group", group.to_string())
                        .with("oov", if oov { "true" } else { "false" }),
                );
            }
        }
        Ok((key.finish(&self.cli.out)?, vec![("trace", rows)]))
    }

    fn expand(&self, a: &ExpandArgs) -> Result<(OutputDir, Tables), CliError> {
        let mut key = self.key("expand");
        let (kind, name) = match a.kind {
            ExpandKind::Synonyms => (ExpansionKind::Synonyms, "synonyms"),
            ExpandKind::Forms => (ExpansionKind::Forms, "forms"),
        };
        key.add_str(name);
        let labels = read_label_input(&a.input, &mut key)?;
        let llm = llm_setup(&a.llm, &mut key)?;
        let outcome = expand_labels(&labels, kind, &llm.client, &llm.model, &llm.settings);
        let dir = key.finish(&self.cli.out)?;
        dir.write(&format!("{name}.tsv"), &outcome.map.to_source())?;
        for f in &outcome.failures {
            log::warn!("{}", serde_json::json!({"event": "expansion_failed", "label": f.label, "error": f.error}));
        }
        let mut rows = vec![Row::new()
            .with("kind", "summary")
            .with("label", "")
            .with("labels", labels.len())
            .with("expanded", outcome.map.len())
            .with("failed", outcome.failures.len())
            .with("error", "")];
        rows.extend(outcome.failures.iter().map(|f| {
            Row::new()
                .with("kind", "failure")
                .with("label", f.label.as_str())
                .with("labels", 1usize)
                .with("expanded", 0usize)
                .with("failed", 1usize)
                .with("error", f.error.clone())
        }));
        Ok((dir, vec![("expansion", rows)]))
    }

    fn correlate(&self, a: &CorrelateArgs) -> Result<(OutputDir, Tables), CliError> {
        let mut key = self.key("correlate");
        let pair_row = |left: &str, right: &str, n: usize, pcc: f64| {
            Row::new().with("left", left).with("right", right).with("n", n).with("pcc", pcc)
        };
        let rows = if let Some(path) = &a.table {
            let text = read_text(path)?;
            key.add_str(&text).add_str(a.reference.as_deref().unwrap_or("")).add_str(&a.add_mavg.to_string());
            let mut table = ScoreTable::parse_csv(&text).map_err(|e| CliError::from(e).in_file(path))?;
            if a.add_mavg {
                table = table.with_m_avg()?;
            }
            let n = table.rows.len();
            match &a.reference {
                Some(reference) => table
                    .correlate_against(reference)?
                    .into_iter()
                    .map(|c| pair_row(reference, &c.column, n, c.pcc))
                    .collect(),
                None => {
                    let m = table.correlation_matrix()?;
                    let mut rows = Vec::new();
                    for (i, row) in m.iter().enumerate() {
                        for (j, r) in row.iter().enumerate().skip(i + 1) {
                            rows.push(pair_row(&table.columns[i], &table.columns[j], n, *r));
                        }
                    }
                    rows
                }
            }
        } else {
            if a.report.len() < 2 {
                return Err(CliError::usage("give --table, or at least two --report files"));
            }
            let names = run_names(&a.report);
            let mut columns = Vec::new();
            for path in &a.report {
                let text = read_text(path)?;
                key.add_str(&text);
                let report = CorpusReport::from_json(&text).map_err(|e| CliError::from(e).in_file(path))?;
                let by_id: BTreeMap<String, f64> = report.per_sample.iter().map(|s| (s.sample_id.clone(), s.f)).collect();
                columns.push(by_id);
            }
            let ids: Vec<&String> = columns[0].keys().collect();
            for (c, path) in columns.iter().zip(&a.report).skip(1) {
                if c.keys().ne(ids.iter().copied()) {
                    return Err(CliError::validation(format!(
                        "{} covers different samples than {}",
                        path.display(),
                        a.report[0].display()
                    )));
                }
            }
            let vectors: Vec<Vec<f64>> = columns.iter().map(|c| c.values().copied().collect()).collect();
            let mut rows = Vec::new();
            for i in 0..vectors.len() {
                for j in i + 1..vectors.len() {
                    rows.push(pair_row(&names[i], &names[j], ids.len(), pearson(&vectors[i], &vectors[j])?));
                }
            }
            rows
        };
        Ok((key.finish(&self.cli.out)?, vec![("correlation", rows)]))
    }

    fn agreement(&self, a: &AgreementArgs) -> Result<(OutputDir, Tables), CliError> {
        let mut key = self.key("agreement");
        let strategies = parse_strategies(&a.strategy, &mut key)?;
        let [strategy] = strategies.as_slice() else {
            return Err(CliError::usage("agreement takes exactly one strategy"));
        };
        let bundle = self.bundle(&mut key)?;
        let partitions = load_partitions(&a.partition, &mut key)?;
        let grouper = Grouper::new(&bundle).with_partitions(&partitions);
        let mut annotations = Vec::new();
        for spec in &a.annotation {
            let (name, path) = match spec.split_once('=') {
                Some(_) => split_named(spec)?,
                None => (stem(Path::new(spec)), PathBuf::from(spec)),
            };
            key.add_str(&name);
            annotations.push(Annotation { annotator: name, records: records(&path, RecordKind::Prediction, &mut key)? });
        }
        let matrix = agreement_matrix(&annotations, &grouper, strategy, self.exec)?;
        let dir = key.finish(&self.cli.out)?;
        dir.write("matrix.csv", &matrix.to_csv())?;
        let mut rows = Vec::new();
        for (m, left) in matrix.annotators.iter().enumerate() {
            for (n, right) in matrix.annotators.iter().enumerate() {
                rows.push(Row::new().with("left", left.as_str()).with("right", right.as_str()).with("jaccard", matrix.get(m, n)));
            }
        }
        Ok((dir, vec![("agreement", rows)]))
    }

    fn stats(&self, a: &StatsArgs) -> Result<(OutputDir, Tables), CliError> {
        let mut key = self.key("stats");
        key.add_str(&a.bucket_width.to_string());
        let recs = records(&a.records, RecordKind::Prediction, &mut key)?;
        let descs = match &a.texts {
            Some(path) => texts(path, &mut key)?,
            None => recs
                .iter()
                .filter_map(|r| r.text.as_ref().map(|t| TextRecord { id: r.sample_id.clone(), text: t.clone() }))
                .collect(),
        };
        let stats = compute_stats(&recs, &descs, a.bucket_width);
        let pcc = if descs.is_empty() { None } else { length_label_correlation(&recs, &descs).ok() };
        let dir = key.finish(&self.cli.out)?;
        let mut json = serde_json::to_string(&stats).expect("stats serialize");
        json.push('\n');
        dir.write("stats.json", &json)?;
        for (name, csv) in stats.tables() {
            dir.write(&format!("{name}.csv"), &csv)?;
        }
        let row = Row::new()
            .with("kind", "stats")
            .with("records", stats.records)
            .with("distinct_emotions", stats.emotion_frequency.len())
            .with("texts", stats.texts)
            .with("length_label_pcc", pcc);
        Ok((dir, vec![("summary", vec![row])]))
    }

    fn baseline(&self, a: &BaselineArgs) -> Result<(OutputDir, Tables), CliError> {
        let mut key = self.key("baseline");
        key.add_str(&self.cli.seed.to_string());
        let space = match &a.labels {
            Some(list) => list
                .split(',')
                .map(|s| Label::new(s).map_err(|e| CliError::usage(format!("--labels: {e}"))))
                .collect::<Result<Vec<_>, _>>()?,
            None => basic_emotions(),
        };
        for l in &space {
            key.add_str(l.as_str());
        }
        let ids: Vec<String> =
            records(&a.ids_from, RecordKind::Prediction, &mut key)?.into_iter().map(|r| r.sample_id).collect();
        let out = random_baseline(&space, self.cli.seed, &ids)?;
        let dir = key.finish(&self.cli.out)?;
        dir.write("baseline.jsonl", &records_to_string(&out))?;
        let row = Row::new()
            .with("kind", "baseline")
            .with("records", out.len())
            .with("labels", space.len())
            .with("seed", self.cli.seed)
            .with("file", "baseline.jsonl");
        Ok((dir, vec![("summary", vec![row])]))
    }

    fn textmetrics(&self, a: &TextmetricsArgs) -> Result<(OutputDir, Tables), CliError> {
        let mut key = self.key("textmetrics");
        let scores: Vec<TextScores> = match (&a.reference, &a.hypothesis, &a.references, &a.hypotheses) {
            (Some(r), Some(h), _, _) => {
                key.add_str(r).add_str(h);
                vec![TextScores::score("1", r, h)?]
            }
            (_, _, Some(rp), Some(hp)) => {
                let refs = texts(rp, &mut key)?;
                let hyps = texts(hp, &mut key)?;
                score_text_corpus(&refs, &hyps, self.exec)?
            }
            _ => return Err(CliError::usage("give --reference/--hypothesis or --references/--hypotheses")),
        };
        let rows = scores
            .iter()
            .map(|s| {
                Row::new().with("id", s.id.as_str()).with("bleu_1", s.bleu_1).with("bleu_4", s.bleu_4).with("rouge_l", s.rouge_l)
            })
            .collect();
        Ok((key.finish(&self.cli.out)?, vec![("scores", rows)]))
    }
}
