#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "crs/errors.hpp"
#include "crs/io.hpp"
#include "crs/workspace.hpp"

namespace {

// Exit codes: 0 = In, 1 = Out, 2 = Unknown, 3 = input/parse error,
// 4 = unresolved name, 5 = construction error, 6 = usage error.
constexpr int kExitParse = 3;
constexpr int kExitResolve = 4;
constexpr int kExitDomain = 5;
constexpr int kExitUsage = 6;

std::string readWorkspaceText(const std::string& path) {
    if (path == "-") {
        std::ostringstream buf;
        buf << std::cin.rdbuf();
        return buf.str();
    }
    std::ifstream in(path);
    if (!in) throw crs::ParseError("cannot open workspace file \"" + path + '"');
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{
        "Discrete coarse-geometry kernel: membership, coarse-map checks, "
        "(co)limits, classification and finite-model oracles over a JSON "
        "workspace of named spaces, structures and maps."};
    std::string query;
    std::vector<std::string> args;
    std::string workspacePath;
    std::string format = "json";
    crs::QueryOptions opt;

    app.add_option("query", query,
                   "one of: check-coarse check-close contains equalizer coequalizer "
                   "quotient classify terminate witness-equivalence sigma-filtration "
                   "fin-oracle")
        ->required();
    app.add_option("args", args, "positional query arguments (names or inline JSON)");
    app.add_option("--workspace", workspacePath, "workspace JSON file, or - for stdin");
    app.add_option("--depth", opt.depth, "search depth for joins and pushed ideals")
        ->capture_default_str();
    app.add_option("--window", opt.window, "stable-window size recorded with reports")
        ->capture_default_str();
    app.add_option("--budget", opt.budget, "probe budget for quantified checks")
        ->capture_default_str();
    app.add_option("--seed", opt.seed, "seed recorded with reports")
        ->capture_default_str();
    app.add_option("--format", format, "output format")
        ->check(CLI::IsMember({"json", "text"}))
        ->capture_default_str();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitUsage;
    }

    try {
        crs::Workspace ws;
        if (!workspacePath.empty())
            ws = crs::Workspace::fromJson(
                crs::io::parseDocument(readWorkspaceText(workspacePath)));
        const crs::QueryReport rep = crs::runQuery(ws, query, args, opt);
        if (format == "json")
            std::cout << rep.payload.dump(2) << '\n';
        else
            std::cout << rep.toText();
        return rep.exitCode();
    } catch (const crs::ParseError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitParse;
    } catch (const crs::ResolveError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitResolve;
    } catch (const crs::InvalidArgument& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const crs::Error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitDomain;
    }
}
