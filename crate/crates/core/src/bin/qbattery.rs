use clap::Parser;

fn main() {
    let cli = qbattery::cli::Cli::parse();
    std::process::exit(qbattery::cli::main_with(cli));
}
