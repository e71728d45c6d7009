// Acceptance checks. Each criterion prints detail lines, then one
// "PASS Cn ..." or "FAIL Cn ..." line; the exit status follows the verdict.

#include <algorithm>
#include <array>
#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <random>
#include <set>
#include <sstream>
#include <thread>

#include "CLI11.hpp"

#include "../published_forms.hpp"
#include "icdb/bench/attack_suite.hpp"
#include "icdb/bench/dataset.hpp"
#include "icdb/bench/fixture.hpp"
#include "icdb/bench/harness.hpp"
#include "icdb/bench/size_model.hpp"
#include "icdb/sql/parser.hpp"
#include "icdb/sql/rewrite.hpp"
#include "icdb/store/attacks.hpp"
#include "icdb/verify_engine.hpp"
#include "icdb/workflow.hpp"

using namespace icdb;
using bench::Combo;
using sql::Model;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

struct Checker {
  bool ok = true;
  void expect(bool cond, const std::string& what) {
    std::cout << "  " << (cond ? "ok   " : "FAIL ") << what << "\n";
    ok = ok && cond;
  }
};

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

// Rewrite fidelity against the published ICDB select lists. Limit 1 s.
bool c1(Checker& ck) {
  const auto t0 = Clock::now();
  const auto company = sql::make_catalog(bench::company_schema(), Model::Ocf);
  const auto q1 = sql::rewrite_select(sql::parse("SELECT lname FROM employee WHERE dno = 5;"), company);
  ck.expect(fixture::column_set(q1.columns) ==
                fixture::column_set("lname, ssn, dno, lname_IC, dno_IC"),
            "Q1 select list: " + q1.icdb_sql);

  const auto world = sql::make_catalog(bench::world_schema(), Model::Ocf, "_SVC");
  const auto corpus = bench::world_select_corpus();
  const auto& published = fixture::icdb_select_lists();
  ck.expect(corpus.size() == 8 && published.size() == 8, "corpus has 8 SELECT statements");
  for (std::size_t i = 0; i < corpus.size() && i < published.size(); ++i) {
    auto got = fixture::column_set(sql::rewrite_select(sql::parse(corpus[i]), world).columns);
    bool extras = true;
    for (const auto& e : fixture::expected_extra(i + 1)) extras = got.erase(e) == 1 && extras;
    ck.expect(extras && got == fixture::column_set(published[i]),
              "corpus Q" + std::to_string(i + 1) + " column set" +
                  (fixture::expected_extra(i + 1).empty() ? "" : " (with expected extra columns)"));
  }
  const double s = seconds_since(t0);
  ck.expect(s < 1.0, "runtime " + fmt("%.3f", s) + " s < 1 s");
  return ck.ok;
}

// Attack matrix on a generated three-table fixture. Limit 5 min.
bool c2(Checker& ck) {
  const auto t0 = Clock::now();
  bench::AttackSuiteOptions o;
  o.rows = 300;
  const auto m = bench::run_attack_suite(o);
  std::istringstream text(m.to_text());
  for (std::string line; std::getline(text, line);) std::cout << "    " << line << "\n";
  for (const auto& c : m.cells) {
    const bool want_all = c.cls != bench::AttackClass::Deletion;
    const bool good = want_all ? c.detected == c.attempts : c.detected == 0;
    if (!good) {
      ck.expect(false, c.combo.label() + " " + std::string(bench::attack_class_name(c.cls)) + " " +
                           c.variant + ": " + std::to_string(c.detected) + "/" +
                           std::to_string(c.attempts));
    }
  }
  ck.expect(m.matches_expected(), "every attack except deletion detected, no deletion detected");
  const double s = seconds_since(t0);
  ck.expect(s < 300.0, "runtime " + fmt("%.1f", s) + " s < 300 s");
  return ck.ok;
}

// Untampered verifications over fresh random keys, datasets and salts.
bool c3(Checker& ck) {
  std::mt19937_64 rng(2024);
  for (SchemeId scheme : {SchemeId::Pbkdf2Mac, SchemeId::AesCipher, SchemeId::RsaSign}) {
    const auto t0 = Clock::now();
    const std::uint64_t target = scheme == SchemeId::RsaSign ? 10000 : 100000;
    std::uint64_t total = 0, bad = 0;
    for (std::size_t round = 0; total < target; ++round) {
      const std::string profile = bench::profiles()[round % 2];
      const Model model = (round / 2) % 2 == 0 ? Model::Ocf : Model::Oct;
      const auto d = bench::generate_dataset(profile, scheme == SchemeId::RsaSign ? 400 : 2000, rng());
      const KeyMaterial key = generate_keys(scheme, rng());
      auto fx = bench::build_icdb(d, model, key);
      for (const auto& t : d.tables) {
        const auto out =
            run_select(fx.store, "SELECT * FROM " + t.name + ";", fx.catalog, key, fx.icrl);
        total += out.report.total;
        bad += out.report.total - out.report.valid;
      }
    }
    const double s = seconds_since(t0);
    ck.expect(bad == 0, std::string(scheme_name(scheme)) + ": " + std::to_string(bad) +
                            " non-VALID of " + std::to_string(total) + " (" + fmt("%.1f", s) + " s)");
    ck.expect(s < 300.0, std::string(scheme_name(scheme)) + " runtime < 300 s");
  }
  return ck.ok;
}

// Size ratios on 10^4 world rows, and byte-exact predictor agreement.
bool c4(Checker& ck) {
  const auto d = bench::generate_dataset("world", 10000, 1);
  const auto rows = bench::measure_sizes(d, bench::all_combos());
  std::istringstream text(bench::size_table(rows));
  for (std::string line; std::getline(text, line);) std::cout << "    " << line << "\n";
  auto ratio = [&](SchemeId s, Model m) {
    for (const auto& r : rows) {
      if (r.combo == Combo{s, m}) return r.ratio();
    }
    return -1.0;
  };
  for (const auto& r : rows) {
    ck.expect(r.icdb_bytes == r.predicted_bytes,
              r.combo.label() + " measured " + std::to_string(r.icdb_bytes) + " == predicted " +
                  std::to_string(r.predicted_bytes));
  }
  const double aes = ratio(SchemeId::AesCipher, Model::Oct);
  const double mac = ratio(SchemeId::Pbkdf2Mac, Model::Ocf);
  const double rsa = ratio(SchemeId::RsaSign, Model::Ocf);
  ck.expect(aes < mac && mac < rsa, "ratio AES_CIPHER-OCT " + fmt("%.2f", aes) +
                                        " < PBKDF2_MAC-OCF " + fmt("%.2f", mac) +
                                        " < RSA_SIGN-OCF " + fmt("%.2f", rsa));
  return ck.ok;
}

// Timing structure on 10^4 world rows, 30 measured iterations.
bool c5(Checker& ck) {
  const auto d = bench::generate_dataset("world", 10000, 1);
  const std::vector<Combo> order = {{SchemeId::AesCipher, Model::Oct},
                                    {SchemeId::Pbkdf2Mac, Model::Ocf},
                                    {SchemeId::RsaSign, Model::Ocf}};
  bench::TimeOptions conv;
  conv.iterations = 30;
  conv.execution = false;
  conv.queries = false;
  const auto c = bench::bench_time(d, order, conv);
  std::vector<double> means;
  for (const auto& combo : order) {
    const auto* r = bench::find_result(c, combo.label(), "convert_seconds");
    means.push_back(r ? r->stats.mean : -1);
    std::cout << "    convert " << combo.label() << " mean " << fmt("%.4f", r->stats.mean)
              << " s, cv " << fmt("%.3f", r->stats.cv()) << ", n " << r->stats.iterations << "\n";
  }
  ck.expect(means[0] < means[1] && means[1] < means[2],
            "conversion AES_CIPHER-OCT < PBKDF2_MAC-OCF < RSA_SIGN-OCF");

  bench::TimeOptions q;
  q.iterations = 30;
  q.conversion = false;
  q.execution = false;
  const Combo rsa{SchemeId::RsaSign, Model::Ocf};
  const auto t = bench::bench_time(d, {rsa}, q);
  double rewrite = 0, exec = 0, verify = 0;
  std::size_t n = 0;
  for (std::size_t i = 1; i <= bench::world_select_corpus().size(); ++i) {
    const std::string label = "Q" + std::to_string(i);
    const auto* rw = bench::find_result(t, rsa.label(), "rewrite_ms", label);
    const auto* ex = bench::find_result(t, rsa.label(), "exec_ms", label);
    const auto* vf = bench::find_result(t, rsa.label(), "verify_ms", label);
    if (!rw || !ex || !vf) continue;
    rewrite += rw->stats.mean;
    exec += ex->stats.mean;
    verify += vf->stats.mean;
    n = std::min(rw->stats.iterations, std::min(ex->stats.iterations, vf->stats.iterations));
    std::cout << "    " << label << " rewrite " << fmt("%.4f", rw->stats.mean) << " ms (cv "
              << fmt("%.3f", rw->stats.cv()) << "), exec " << fmt("%.4f", ex->stats.mean)
              << " ms (cv " << fmt("%.3f", ex->stats.cv()) << "), verify "
              << fmt("%.2f", vf->stats.mean) << " ms (cv " << fmt("%.3f", vf->stats.cv()) << ")\n";
  }
  ck.expect(n >= 30, "measured iterations per query " + std::to_string(n) + " >= 30");
  const double vx = exec > 0 ? verify / exec : 0;
  ck.expect(vx >= 100.0, "RSA_SIGN-OCF verify/exec " + fmt("%.1f", vx) + "x >= 100x");
  const double share = rewrite / (rewrite + exec + verify);
  ck.expect(share <= 0.01, "RSA_SIGN-OCF rewrite share " + fmt("%.5f", share) + " <= 0.01");
  return ck.ok;
}

// Worker-count independence and speedup on 10^4+ RSA checks.
bool c6(Checker& ck) {
  const auto d = bench::generate_dataset("world", 10000, 3);
  const KeyMaterial& key = bench::bench_key(SchemeId::RsaSign);
  auto fx = bench::build_icdb(d, Model::Ocf, key);
  const auto& city = fx.store.table("City");
  for (std::size_t r = 0; r < city.rows.size(); r += 503) {
    store::attack_forge(fx.store, "City", city.key_of(city.rows[r]), "Name", Cell("forged"));
  }
  const auto plan = sql::rewrite_select(sql::parse("SELECT * FROM City;"), fx.catalog);
  const auto rs = fx.store.execute(plan.icdb_sql);
  const auto serial = verify_result_set(rs, plan, key, fx.icrl);
  ck.expect(serial.total >= 10000, "checks per run " + std::to_string(serial.total) + " >= 10000");
  ck.expect(serial.forged > 0, "planted forgeries reported");
  for (int w : {1, 2, 4, 8}) {
    ck.expect(verify_parallel(rs, plan, key, fx.icrl, w).canonical() == serial.canonical(),
              "report with " + std::to_string(w) + " workers byte-identical to serial");
  }
  auto best_of = [&](const std::function<void()>& fn) {
    double best = 1e300;
    for (int i = 0; i < 3; ++i) {
      const auto t0 = Clock::now();
      fn();
      best = std::min(best, seconds_since(t0));
    }
    return best;
  };
  const double t1 = best_of([&] { verify_result_set(rs, plan, key, fx.icrl); });
  const double t4 = best_of([&] { verify_parallel(rs, plan, key, fx.icrl, 4); });
  const double speedup = t1 / t4;
  ck.expect(speedup > 1.5, "speedup at 4 workers " + fmt("%.2f", speedup) + "x > 1.5x (serial " +
                               fmt("%.3f", t1) + " s, 4 workers " + fmt("%.3f", t4) + " s, " +
                               std::to_string(std::thread::hardware_concurrency()) +
                               " hardware threads)");
  return ck.ok;
}

// Serials embedded in the coded rows, read straight from the stored cells.
std::set<std::uint64_t> row_serials(const store::StoredTable& t, const std::vector<Cell>& row,
                                    Model model, SchemeId scheme) {
  std::set<std::uint64_t> out;
  if (model == Model::Oct) {
    out.insert(std::stoull(*row[t.at(sql::kSerialColumn)]));
    return out;
  }
  for (std::size_t c = 0; c < t.columns.size(); ++c) {
    if (t.columns[c].name.ends_with("_IC") && row[c]) {
      out.insert(sql::decode_ic_cell(*row[c], scheme).serial);
    }
  }
  return out;
}

// Full pipeline per profile and combination, then delete and replay.
bool c7(Checker& ck) {
  struct Target {
    std::string table, column;
  };
  const std::map<std::string, Target> targets = {{"world", {"City", "Population"}},
                                                 {"company", {"employee", "salary"}}};
  for (const auto& profile : bench::profiles()) {
    const auto d = bench::generate_dataset(profile, 600, 11);
    for (const auto& combo : bench::all_combos()) {
      const std::string tag = profile + " " + combo.label();
      const KeyMaterial& key = bench::bench_key(combo.scheme);
      auto fx = bench::build_icdb(d, combo.model, key);
      bool all_valid = true;
      for (const auto& t : d.tables) {
        all_valid = all_valid &&
                    run_select(fx.store, "SELECT * FROM " + t.name + ";", fx.catalog, key, fx.icrl)
                        .report.all_valid();
      }
      ck.expect(all_valid, tag + ": SELECT * of every table all VALID");

      const Target& tg = targets.at(profile);
      const auto& table = fx.store.table(tg.table);
      const std::size_t col = table.at(tg.column);
      std::vector<double> values;
      for (const auto& row : table.rows) values.push_back(std::stod(*row[col]));
      std::nth_element(values.begin(), values.begin() + values.size() / 2, values.end());
      const double median = values[values.size() / 2];
      std::set<std::uint64_t> doomed;
      std::vector<store::SavedRow> saved;
      for (const auto& row : table.rows) {
        if (std::stod(*row[col]) < median) {
          const auto s = row_serials(table, row, combo.model, combo.scheme);
          doomed.insert(s.begin(), s.end());
          saved.push_back(store::save_row(fx.store, tg.table, table.key_of(row)));
        }
      }
      std::ostringstream del;
      del.precision(17);
      del << "DELETE FROM " << tg.table << " WHERE " << tg.column << " < " << median << ";";
      const Icrl before = fx.icrl;
      run_delete(fx.store, del.str(), fx.catalog, key, fx.icrl);
      std::set<std::uint64_t> revoked;
      for (std::uint64_t s = 1; s < fx.icrl.next_serial(); ++s) {
        if (fx.icrl.is_revoked(s)) revoked.insert(s);
      }
      ck.expect(!doomed.empty() && revoked == doomed && before.revoked_count() == 0,
                tag + ": DELETE revoked exactly the " + std::to_string(doomed.size()) +
                    " serials of the " + std::to_string(saved.size()) + " deleted rows");

      for (const auto& r : saved) store::attack_replay_old(fx.store, tg.table, r);
      const auto replay =
          run_select(fx.store, "SELECT * FROM " + tg.table + ";", fx.catalog, key, fx.icrl);
      std::set<std::uint64_t> stale_rows;
      bool only_stale = true;
      for (const auto& f : replay.report.failures) {
        only_stale = only_stale && f.verdict.status == Status::Stale;
        stale_rows.insert(f.row);
      }
      ck.expect(only_stale && stale_rows.size() == saved.size() &&
                    replay.report.stale == replay.report.failures.size(),
                tag + ": replayed rows verify STALE (" + std::to_string(replay.report.stale) +
                    " codes over " + std::to_string(stale_rows.size()) + " rows)");
    }
  }
  return ck.ok;
}

// load(save(x)) == x for random ICRL and key states, bit for bit.
bool c8(Checker& ck) {
  std::mt19937_64 rng(8);
  std::size_t icrl_bad = 0, key_bad = 0;
  const std::string dir = std::filesystem::temp_directory_path() / "icdb_acceptance_c8";
  std::filesystem::create_directories(dir);
  auto read = [](const std::string& p) {
    std::ifstream f(p, std::ios::binary);
    return std::string((std::istreambuf_iterator<char>(f)), {});
  };
  for (int i = 0; i < 1000; ++i) {
    Icrl icrl;
    const std::uint64_t n = 1 + rng() % 5000;
    icrl.allocate_block(n);
    const std::size_t revokes = rng() % 40;
    for (std::size_t k = 0; k < revokes; ++k) {
      const std::uint64_t a = 1 + rng() % n;
      const std::uint64_t b = std::min<std::uint64_t>(n, a + rng() % 20);
      icrl.revoke_range(a, b);
    }
    const std::string path = dir + "/state.icrl";
    icrl.save(path);
    const std::string bytes = read(path);
    const Icrl back = Icrl::load(path);
    back.save(path);
    if (!(back == icrl) || read(path) != bytes || bytes != icrl.serialize()) ++icrl_bad;
  }
  const std::array schemes = {SchemeId::RsaSign, SchemeId::Pbkdf2Mac, SchemeId::AesCipher};
  for (int i = 0; i < 1000; ++i) {
    const KeyMaterial key = generate_keys(schemes[i % 3], rng());
    const std::string path = dir + "/state.key";
    save_key_file(key, path);
    const std::string bytes = read(path);
    const KeyMaterial back = load_key_file(path);
    save_key_file(back, path);
    if (!(back == key) || read(path) != bytes || bytes != serialize_key_file(key)) ++key_bad;
  }
  std::filesystem::remove_all(dir);
  ck.expect(icrl_bad == 0, "ICRL files: " + std::to_string(icrl_bad) + " mismatches of 1000");
  ck.expect(key_bad == 0, "key files: " + std::to_string(key_bad) + " mismatches of 1000");
  return ck.ok;
}

struct Criterion {
  const char* title;
  bool (*run)(Checker&);
};

const Criterion kCriteria[] = {
    {"query rewrite fidelity", c1},      {"attack detection matrix", c2},
    {"no false positives", c3},          {"size overhead", c4},
    {"timing structure", c5},            {"parallel determinism and speedup", c6},
    {"round-trip pipeline", c7},         {"file format exactness", c8},
};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"ICDB acceptance checks"};
  std::vector<int> which;
  app.add_option("--criterion", which, "criteria to run (default: all)")->check(CLI::Range(1, 8));
  CLI11_PARSE(app, argc, argv);
  if (which.empty()) which = {1, 2, 3, 4, 5, 6, 7, 8};
  bool all = true;
  for (int n : which) {
    const Criterion& c = kCriteria[n - 1];
    std::cout << "C" << n << " " << c.title << "\n";
    Checker ck;
    const auto t0 = Clock::now();
    bool ok = false;
    try {
      ok = c.run(ck);
    } catch (const std::exception& e) {
      std::cout << "  error: " << e.what() << "\n";
    }
    std::cout << (ok ? "PASS" : "FAIL") << " C" << n << " " << c.title << " ("
              << fmt("%.1f", seconds_since(t0)) << " s)\n"
              << std::flush;
    all = all && ok;
  }
  return all ? 0 : 1;
}
