fn main() {
    std::process::exit(asmsynth::cli::run(std::env::args_os()));
}
