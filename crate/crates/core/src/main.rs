use clap::Parser;

fn main() {
    let cli = multiport::cli::Cli::parse();
    let stdout = std::io::stdout();
    let stderr = std::io::stderr();
    let code = multiport::cli::run(cli, &mut stdout.lock(), &mut stderr.lock());
    std::process::exit(code);
}
