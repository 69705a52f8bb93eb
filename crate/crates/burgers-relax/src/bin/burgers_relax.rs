use clap::Parser;

use burgers_relax::cli::{run, Cli};

fn main() {
    // BURGERS_RELAX_THREADS caps internal parallelism
    if let Ok(threads) = std::env::var("BURGERS_RELAX_THREADS") {
        if let Ok(k) = threads.parse::<usize>() {
            let _ = rayon::ThreadPoolBuilder::new()
                .num_threads(k.max(1))
                .build_global();
        }
    }
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => std::process::exit(code),
        Err(e) => {
            eprintln!("error: {e}");
            std::process::exit(1);
        }
    }
}
