#include <chrono>
#include <cstdio>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "hou/engine.hpp"
#include "hou/errors.hpp"
#include "hou/fingerprint.hpp"
#include "hou/index_check.hpp"
#include "hou/problem_io.hpp"

namespace {

enum Exit { kOk = 0, kNoResult = 1, kInputError = 2, kInternalError = 3 };

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ','))
    if (!item.empty()) out.push_back(item);
  return out;
}

hou::Limits parse_limits(const std::string& s) {
  std::vector<std::string> parts = split_list(s);
  if (parts.size() != 5) throw CLI::ValidationError("--limits", "expected TOTAL,FP,EL,IM,ID");
  std::uint32_t v[5];
  for (int i = 0; i < 5; ++i) {
    std::size_t used = 0;
    long long x = -1;
    try {
      x = std::stoll(parts[i], &used);
    } catch (const std::exception&) {
    }
    if (x < 0 || used != parts[i].size()) throw CLI::ValidationError("--limits", "limits must be non-negative integers");
    v[i] = static_cast<std::uint32_t>(x);
  }
  return {v[0], v[1], v[2], v[3], v[4]};
}

struct SolveOptions {
  std::string file;
  std::string variant = "pragmatic";
  std::string oracles = "pattern,fixpoint,solid";
  std::string limits = "4,2,2,2,2";
  std::uint64_t max_unifiers = 0;
  std::uint64_t max_steps = 100000;
  std::uint64_t timeout_ms = 0;
  bool verify = false;
};

hou::EngineConfig engine_config(const SolveOptions& o) {
  hou::EngineConfig cfg;
  cfg.variant = o.variant == "complete" ? hou::Variant::Complete : hou::Variant::Pragmatic;
  cfg.oracles.clear();
  for (const std::string& n : split_list(o.oracles))
    if (n != "none") {
      hou::make_oracle(n);  // validates the name
      cfg.oracles.push_back(n);
    }
  cfg.limits = parse_limits(o.limits);
  cfg.max_steps = o.max_steps;
  return cfg;
}

int cmd_solve(const SolveOptions& o) {
  hou::ProblemFile pf = hou::read_problem_file(o.file);
  hou::EngineConfig cfg = engine_config(o);
  cfg.first_fresh = static_cast<hou::VarId>(pf.sig.vars.size());
  auto start = std::chrono::steady_clock::now();
  hou::UnifierStream stream = hou::solve(pf.goals, cfg);
  std::uint64_t found = 0;
  std::string status;
  while (true) {
    if (o.timeout_ms > 0) {
      auto ms = std::chrono::duration_cast<std::chrono::milliseconds>(std::chrono::steady_clock::now() - start).count();
      if (static_cast<std::uint64_t>(ms) >= o.timeout_ms) {
        status = "timeout";
        break;
      }
    }
    if (o.max_unifiers > 0 && found >= o.max_unifiers) {
      status = "budget";
      break;
    }
    hou::StreamItem it = stream.pull();
    if (it.kind == hou::StreamItem::Kind::End) {
      status = hou::status_name(stream.status());
      break;
    }
    if (it.kind != hou::StreamItem::Kind::Unifier) continue;
    if (o.verify && !hou::verify_unifier(pf.goals, it.unifier)) {
      std::cerr << "verification failed for unifier " << (found + 1) << ":\n" << hou::print_unifier(it.unifier, pf);
      return kInternalError;
    }
    ++found;
    std::cout << "unifier " << found << ":\n";
    std::istringstream lines(hou::print_unifier(it.unifier, pf));
    for (std::string line; std::getline(lines, line);) std::cout << "  " << line << "\n";
    std::cout.flush();
  }
  const hou::EngineStats& st = stream.stats();
  std::cout << "status: " << status << "\n";
  std::cout << "unifiers: " << found << " steps: " << st.steps << " pulls: " << stream.pulls() << "\n";
  return found > 0 ? kOk : kNoResult;
}

struct IndexOptions {
  std::string file;
  std::string positions = "e,1,2,1.1,1.2,2.1";
  bool verify = false;
};

int cmd_index(const IndexOptions& o) {
  hou::ProblemFile pf = hou::read_problem_file(o.file);
  hou::FingerprintIndex index(hou::parse_positions(o.positions));
  auto name = [&](hou::SymbolId id) {
    return id < pf.sig.const_names.size() ? pf.sig.const_names[id] : "c" + std::to_string(id);
  };
  std::cout << "positions: " << hou::format_positions(index.positions()) << "\n";
  for (std::size_t i = 0; i < pf.terms.size(); ++i) {
    hou::Fingerprint fp = index.fingerprint(pf.terms[i]);
    index.insert(i, fp);
    std::cout << "term " << i << ": " << hou::print_term(pf.terms[i], pf.sig) << "  fp "
              << hou::format_fingerprint(fp, name) << "\n";
  }
  hou::EngineConfig cfg;
  cfg.max_steps = 20000;
  std::size_t pairs = 0, kept = 0;
  for (std::size_t q = 0; q < pf.queries.size(); ++q) {
    const hou::IndexQuery& query = pf.queries[q];
    hou::Fingerprint fp = index.fingerprint(query.term);
    std::vector<std::size_t> cand =
        query.matching ? index.retrieve_matching(fp) : index.retrieve_unifiable(fp);
    pairs += pf.terms.size();
    kept += cand.size();
    std::cout << "query " << q << (query.matching ? " match: " : " unif: ") << hou::print_term(query.term, pf.sig)
              << "  fp " << hou::format_fingerprint(fp, name) << "\n  candidates:";
    for (std::size_t c : cand) std::cout << " " << c;
    std::cout << "\n";
    if (!o.verify) continue;
    std::cout << "  confirmed:";
    for (std::size_t i = 0; i < pf.terms.size(); ++i) {
      hou::Confirmation c = query.matching ? hou::confirm_matching(query.term, pf.terms[i], cfg)
                                           : hou::confirm_unifiable(query.term, pf.terms[i], cfg);
      if (c != hou::Confirmation::Yes) continue;
      std::cout << " " << i;
      if (!std::binary_search(cand.begin(), cand.end(), i)) {
        std::cout << "\n";
        std::cerr << "index missed term " << i << " for query " << q << "\n";
        return kInternalError;
      }
    }
    std::cout << "\n";
  }
  double ratio = pairs == 0 ? 0.0 : 1.0 - static_cast<double>(kept) / static_cast<double>(pairs);
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.3f", ratio);
  std::cout << "filter ratio: " << buf << " (" << (pairs - kept) << " of " << pairs << " pairs filtered)\n";
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Higher-order unification and fingerprint indexing"};
  app.require_subcommand(1);

  SolveOptions so;
  CLI::App* solve = app.add_subcommand("solve", "Enumerate unifiers of a .hou problem");
  solve->add_option("FILE", so.file, "Problem file")->required();
  solve->add_option("--variant", so.variant, "complete or pragmatic")
      ->check(CLI::IsMember({"complete", "pragmatic"}))
      ->capture_default_str();
  solve->add_option("--oracles", so.oracles, "Comma-separated oracles in priority order, or none")
      ->capture_default_str();
  solve->add_option("--limits", so.limits, "Pragmatic limits TOTAL,FP,EL,IM,ID")->capture_default_str();
  solve->add_option("--max-unifiers", so.max_unifiers, "Stop after N unifiers (0: unbounded)");
  solve->add_option("--max-steps", so.max_steps, "Transition budget")->capture_default_str();
  solve->add_option("--timeout-ms", so.timeout_ms, "Wall-clock limit (0: none)");
  solve->add_flag("--verify", so.verify, "Check every unifier before printing");

  IndexOptions io;
  CLI::App* index = app.add_subcommand("index", "Fingerprint-index the terms of a file and answer its queries");
  index->add_option("FILE", io.file, "Index file")->required();
  index->add_option("--positions", io.positions, "Comma-separated sample positions")->capture_default_str();
  index->add_flag("--verify", io.verify, "Confirm candidates with the engine");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? kOk : kInputError;
  }

  try {
    if (*solve) return cmd_solve(so);
    return cmd_index(io);
  } catch (const CLI::ValidationError& e) {
    std::cerr << e.what() << "\n";
    return kInputError;
  } catch (const hou::ParseError& e) {
    std::cerr << "parse error: " << e.what() << "\n";
    return kInputError;
  } catch (const hou::DeclError& e) {
    std::cerr << "declaration error: " << e.what() << "\n";
    return kInputError;
  } catch (const hou::InvalidPosition& e) {
    std::cerr << "invalid position: " << e.what() << "\n";
    return kInputError;
  } catch (const std::invalid_argument& e) {
    std::cerr << "invalid argument: " << e.what() << "\n";
    return kInputError;
  } catch (const hou::IoError& e) {
    std::cerr << e.what() << "\n";
    return kInputError;
  } catch (const hou::Error& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return kInternalError;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return kInternalError;
  }
}
