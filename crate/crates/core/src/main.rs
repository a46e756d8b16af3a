fn main() -> std::process::ExitCode {
    hths::cli::main()
}
