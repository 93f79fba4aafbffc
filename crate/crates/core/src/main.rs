use std::collections::HashMap;
use std::path::{Path, PathBuf};
use std::sync::Arc;
use std::time::Duration;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};

use litsift::arxiv::{dedup, fetch_all, ArxivClient, FeedSource, FixtureFeeds, PaperRecord};
use litsift::bench::{compare_providers, emit_plot_data, write_bench_csv, UnavailableEmbedder};
use litsift::cache::StageCache;
use litsift::config::{load_config, ConfigOverrides, Endpoints, PipelineConfig};
use litsift::embedding::{paper_text, query_text, Embedder, ProviderKind};
use litsift::pipeline::{build_embedder, offline_endpoints, run_pipeline, Services};
use litsift::query::InputQuery;
use litsift::relevance::{compute_stats, filter_by_threshold, score_candidates};
use litsift::synthesis::{build_bibliography, render_bibliography};
use litsift::transport::{HttpTransport, OfflineTransport, UreqTransport};

#[derive(Parser)]
#[command(
    name = "litsift",
    version,
    about = "arXiv literature review from a title and abstract"
)]
struct Cli {
    /// TOML file with pipeline settings.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Never touch the network; read feeds, PDFs and LLM replies from --fixtures.
    #[arg(long, global = true)]
    offline: bool,
    #[arg(long, global = true)]
    fixtures: Option<PathBuf>,
    #[arg(short, long, global = true, action = clap::ArgAction::Count)]
    verbose: u8,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct QueryArgs {
    #[arg(long)]
    title: String,
    #[arg(long, conflicts_with = "abstract_text")]
    abstract_file: Option<PathBuf>,
    #[arg(long = "abstract")]
    abstract_text: Option<String>,
}

impl QueryArgs {
    fn load(&self) -> Result<InputQuery> {
        let text = match (&self.abstract_file, &self.abstract_text) {
            (Some(path), _) => std::fs::read_to_string(path)
                .with_context(|| format!("reading {}", path.display()))?,
            (None, Some(text)) => text.clone(),
            (None, None) => bail!("one of --abstract-file or --abstract is required"),
        };
        Ok(InputQuery::new(self.title.clone(), text)?)
    }
}

#[derive(Args, Default)]
struct Overrides {
    #[arg(long)]
    provider: Option<String>,
    #[arg(long)]
    iqr_multiplier: Option<f64>,
    #[arg(long)]
    max_per_keyword: Option<usize>,
    #[arg(long)]
    output_dir: Option<PathBuf>,
    #[arg(long)]
    cache_dir: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Run the whole pipeline and write the review bundle.
    Review {
        #[command(flatten)]
        query: QueryArgs,
        #[command(flatten)]
        overrides: Overrides,
    },
    /// Retrieve and deduplicate candidates for comma-separated keywords.
    Fetch {
        #[arg(long, value_delimiter = ',', required = true)]
        keywords: Vec<String>,
        #[command(flatten)]
        overrides: Overrides,
    },
    /// Score a candidate corpus against a query and apply the threshold.
    Filter {
        #[command(flatten)]
        query: QueryArgs,
        #[arg(long)]
        corpus: PathBuf,
        #[command(flatten)]
        overrides: Overrides,
    },
    /// Compare embedding providers on one corpus.
    Eval {
        #[command(flatten)]
        query: QueryArgs,
        #[arg(long)]
        corpus: PathBuf,
        #[arg(long, value_delimiter = ',', default_value = "tfidf,minilm,specter2")]
        providers: Vec<String>,
        #[command(flatten)]
        overrides: Overrides,
    },
    /// Write BibTeX for a corpus file.
    Bibtex {
        #[arg(long)]
        corpus: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn config_for(cli: &Cli, o: &Overrides, env: &HashMap<String, String>) -> Result<PipelineConfig> {
    let overrides = ConfigOverrides {
        provider_id: o.provider.clone(),
        iqr_multiplier: o.iqr_multiplier,
        max_per_keyword: o.max_per_keyword,
        output_dir: o.output_dir.clone(),
        cache_dir: o.cache_dir.clone(),
        ..Default::default()
    };
    Ok(load_config(cli.config.as_deref(), env, &overrides)?)
}

fn fixtures(cli: &Cli) -> Result<&Path> {
    cli.fixtures
        .as_deref()
        .context("--offline requires --fixtures <dir>")
}

fn transport(cli: &Cli) -> Arc<dyn HttpTransport> {
    if cli.offline {
        Arc::new(OfflineTransport)
    } else {
        Arc::new(UreqTransport::default())
    }
}

fn endpoints(cli: &Cli, env: &HashMap<String, String>) -> Endpoints {
    if cli.offline {
        offline_endpoints()
    } else {
        Endpoints::from_env(env)
    }
}

fn read_corpus(path: &Path) -> Result<Vec<PaperRecord>> {
    let bytes = std::fs::read(path).with_context(|| format!("reading {}", path.display()))?;
    serde_json::from_slice(&bytes).with_context(|| format!("parsing {}", path.display()))
}

fn embedder(
    cli: &Cli,
    env: &HashMap<String, String>,
    kind: ProviderKind,
    cache: &Path,
) -> Result<Box<dyn Embedder>> {
    Ok(build_embedder(
        kind,
        &endpoints(cli, env),
        transport(cli),
        StageCache::new(cache),
    )?)
}

fn run(cli: &Cli) -> Result<()> {
    let env: HashMap<String, String> = std::env::vars().collect();
    match &cli.command {
        Command::Review { query, overrides } => {
            let config = config_for(cli, overrides, &env)?;
            let query = query.load()?;
            let services = if cli.offline {
                Services::offline(&config, fixtures(cli)?)?
            } else {
                Services::live(&config, &Endpoints::from_env(&env), transport(cli))?
            };
            let bundle = run_pipeline(&query, &config, &services)?;
            println!(
                "{} candidates, {} retained (threshold {:.4}), {} reviewed, {} failed",
                bundle.candidates.len(),
                bundle.retained.len(),
                bundle.stats.threshold,
                bundle.analysed.len(),
                bundle.failures.len()
            );
            println!("outputs in {}", bundle.output_dir.display());
        }
        Command::Fetch {
            keywords,
            overrides,
        } => {
            let config = config_for(cli, overrides, &env)?;
            let source: Box<dyn FeedSource> = if cli.offline {
                Box::new(FixtureFeeds::new(fixtures(cli)?))
            } else {
                Box::new(ArxivClient::new(
                    transport(cli),
                    Duration::from_millis(config.request_delay_ms),
                    StageCache::new(config.cache_dir()),
                ))
            };
            let records = dedup(fetch_all(
                source.as_ref(),
                keywords,
                config.max_per_keyword,
            )?);
            std::fs::create_dir_all(&config.output_dir)?;
            let path = config.output_dir.join("papers.json");
            std::fs::write(&path, serde_json::to_string_pretty(&records)?)?;
            println!(
                "{} unique papers written to {}",
                records.len(),
                path.display()
            );
        }
        Command::Filter {
            query,
            corpus,
            overrides,
        } => {
            let config = config_for(cli, overrides, &env)?;
            let query = query.load()?;
            let corpus = read_corpus(corpus)?;
            let embedder = embedder(cli, &env, config.provider(), &config.cache_dir())?;
            let texts: Vec<String> = std::iter::once(query_text(&query))
                .chain(corpus.iter().map(paper_text))
                .collect();
            let vectors = embedder.embed(&texts)?;
            let pairs: Vec<_> = corpus
                .iter()
                .map(|r| r.arxiv_id.clone())
                .zip(vectors[1..].iter().cloned())
                .collect();
            let (scores, _) = score_candidates(&vectors[0], &pairs)?;
            let values: Vec<f64> = scores.iter().map(|s| s.score).collect();
            let stats = compute_stats(&values, config.iqr_multiplier)?;
            println!(
                "threshold {:.4} skewness {:.4}",
                stats.threshold, stats.skewness
            );
            for s in filter_by_threshold(&scores, &stats) {
                println!("{}\t{:.4}", s.arxiv_id, s.score);
            }
        }
        Command::Eval {
            query,
            corpus,
            providers,
            overrides,
        } => {
            let config = config_for(cli, overrides, &env)?;
            let query = query.load()?;
            let corpus = read_corpus(corpus)?;
            let mut embedders = Vec::new();
            for p in providers {
                let kind =
                    ProviderKind::parse(p).with_context(|| format!("unknown provider `{p}`"))?;
                embedders.push(
                    embedder(cli, &env, kind, &config.cache_dir()).unwrap_or_else(|e| {
                        Box::new(UnavailableEmbedder {
                            provider_id: kind.as_str().into(),
                            reason: e.to_string(),
                        })
                    }),
                );
            }
            let refs: Vec<&dyn Embedder> = embedders.iter().map(|e| e.as_ref()).collect();
            let report = compare_providers(&query, &corpus, &refs, config.iqr_multiplier)?;
            std::fs::create_dir_all(&config.output_dir)?;
            write_bench_csv(&report.rows, &config.output_dir.join("bench.csv"))?;
            emit_plot_data(&report, &config.output_dir)?;
            for row in &report.rows {
                match &row.error {
                    Some(e) => println!("{}\terror: {e}", row.provider_id),
                    None => println!(
                        "{}\tthreshold {:.4}\tskewness {:.4}\tretained {}/{}",
                        row.provider_id,
                        row.threshold.unwrap_or(f64::NAN),
                        row.skewness.unwrap_or(f64::NAN),
                        row.retained_count.unwrap_or(0),
                        row.n
                    ),
                }
            }
        }
        Command::Bibtex { corpus, out } => {
            let text = render_bibliography(&build_bibliography(&read_corpus(corpus)?))?;
            match out {
                Some(path) => std::fs::write(path, text)?,
                None => print!("{text}"),
            }
        }
    }
    Ok(())
}

fn main() -> Result<()> {
    let cli = Cli::parse();
    let level = match cli.verbose {
        0 => tracing::Level::WARN,
        1 => tracing::Level::INFO,
        _ => tracing::Level::DEBUG,
    };
    tracing_subscriber::fmt()
        .with_max_level(level)
        .with_writer(std::io::stderr)
        .init();
    run(&cli)
}
