// ==========================================================================
// ffmm: exact linear algebra kernels over word-size prime fields
// command-line front end
// ==========================================================================
#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "ffmm/bench.hpp"
#include "ffmm/binseg.hpp"
#include "ffmm/factor.hpp"
#include "ffmm/lift.hpp"
#include "ffmm/matrix_io.hpp"
#include "ffmm/multiply.hpp"
#include "ffmm/scheme_io.hpp"
#include "ffmm/schemes.hpp"

using namespace ffmm;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitInput = 1;
constexpr int kExitMath = 2;

unsigned effective_tasks(unsigned cli_tasks) {
    if (const char* env = std::getenv("FFMM_THREADS")) {
        int v = std::atoi(env);
        if (v > 0) return static_cast<unsigned>(v);
    }
    return cli_tasks;
}

int cmd_mul(const std::string& file_a, const std::string& file_b,
            const std::string& out, std::int64_t mod, const std::string& algo,
            std::size_t threshold, unsigned tasks) {
    MatrixFile fa = load_matrix_file(file_a);
    MatrixFile fb = load_matrix_file(file_b);
    if (fa.cols != fb.rows) {
        std::cerr << "mul: inner dimensions differ\n";
        return kExitInput;
    }
    if (mod == 0) {
        // Integer matrices: arbitrary-precision classical product.
        Mat<BigInt> C(fa.rows, fb.cols);
        for (std::size_t i = 0; i < fa.rows; ++i)
            for (std::size_t k = 0; k < fb.cols; ++k) {
                BigInt acc = 0;
                for (std::size_t j = 0; j < fa.cols; ++j)
                    acc += fa.entries(i, j) * fb.entries(j, k);
                C(i, k) = acc;
            }
        save_matrix_file(out, MatrixFile::from_integers(C));
        return kExitOk;
    }
    PrimeField F(mod);
    ElemMat A = fa.to_residues(F), B = fb.to_residues(F);
    CascadeConfig cfg;
    cfg.base_threshold = threshold;
    cfg.parallel_tasks = effective_tasks(tasks);
    ElemMat C;
    if (algo == "classic")
        C = mm_classic(A.view(), B.view(), F);
    else if (algo == "waksman")
        C = mm_waksman(A.view(), B.view(), F);
    else if (algo == "fast")
        C = mm_fast(A.view(), B.view(), F, cfg);
    else if (algo == "parallel")
        C = mm_parallel(A.view(), B.view(), F, cfg);
    else {
        std::cerr << "mul: unknown algorithm " << algo << "\n";
        return kExitInput;
    }
    save_matrix_file(out, MatrixFile::from_residues(C.view(), mod));
    return kExitOk;
}

int cmd_solve(const std::string& file_a, const std::string& file_b,
              bool check, int prime_bits) {
    MatrixFile fa = load_matrix_file(file_a);
    MatrixFile fb = load_matrix_file(file_b);
    if (fa.modulus != 0 || fb.modulus != 0) {
        std::cerr << "solve: expected integer matrices (modulus 0)\n";
        return kExitInput;
    }
    if (fa.rows != fa.cols || fb.cols != 1 || fb.rows != fa.rows) {
        std::cerr << "solve: need square A and a column vector b\n";
        return kExitInput;
    }
    IntVec b(fb.rows);
    for (std::size_t i = 0; i < fb.rows; ++i) b[i] = fb.entries(i, 0);
    RationalVector x;
    try {
        x = dixon_solve(fa.entries, b, prime_bits);
    } catch (const SingularSystemError& e) {
        std::cerr << "solve: " << e.what() << "\n";
        return kExitMath;
    }
    for (const auto& xi : x)
        std::cout << xi.get_num() << '/' << xi.get_den() << '\n';
    if (check) {
        bool ok = true;
        for (std::size_t i = 0; i < fa.rows && ok; ++i) {
            Rational acc = 0;
            for (std::size_t j = 0; j < fa.cols; ++j)
                acc += Rational(fa.entries(i, j)) * x[j];
            ok = acc == Rational(b[i]);
        }
        std::cout << (ok ? "verified" : "verification FAILED") << '\n';
        if (!ok) return kExitMath;
    }
    return kExitOk;
}

int cmd_scheme_verify(const std::string& file) {
    std::ifstream is(file);
    if (!is) {
        std::cerr << "scheme: cannot open " << file << "\n";
        return kExitInput;
    }
    bool apa = false;
    ApaScheme a = read_scheme_any(is, apa);
    if (apa) {
        if (apa_verify(a)) {
            std::cout << "OK rank=" << a.border_rank() << " apa degree="
                      << a.degree() << '\n';
            return kExitOk;
        }
        std::cout << "FAIL apa expansion\n";
        return kExitMath;
    }
    // exact: degree-0 coefficients
    TrilinearScheme t;
    t.mm_dims = a.mm_dims;
    t.target = a.target;
    t.F1 = QMat(a.F1.rows(), a.F1.cols());
    t.F2 = QMat(a.F2.rows(), a.F2.cols());
    t.F3 = QMat(a.F3.rows(), a.F3.cols());
    for (std::size_t q = 0; q < a.border_rank(); ++q) {
        for (std::size_t i = 0; i < a.F1.cols(); ++i)
            t.F1(q, i) = a.F1(q, i).coeff(0);
        for (std::size_t i = 0; i < a.F2.cols(); ++i)
            t.F2(q, i) = a.F2(q, i).coeff(0);
        for (std::size_t i = 0; i < a.F3.cols(); ++i)
            t.F3(q, i) = a.F3(q, i).coeff(0);
    }
    BilinearScheme s = trilinear_to_bilinear(t, TriRole::W);
    std::array<std::size_t, 3> fail{};
    if (brent_verify(s, &fail)) {
        std::cout << "OK rank=" << s.rank() << '\n';
        return kExitOk;
    }
    std::cout << "FAIL at (" << fail[0] << "," << fail[1] << "," << fail[2]
              << ")\n";
    return kExitMath;
}

int cmd_scheme_dualize(const std::string& file, const std::string& prefix) {
    BilinearScheme s = load_scheme_file(file);
    int idx = 0;
    for (DualPerm perm : all_dual_perms) {
        BilinearScheme d = dualize(s, perm);
        std::ostringstream name;
        name << prefix << idx++ << ".scm";
        save_scheme_file(name.str(), d);
        std::cout << name.str() << " MM(" << d.m() << "," << d.n() << ","
                  << d.p() << ") rank=" << d.rank() << '\n';
    }
    return kExitOk;
}

int cmd_scheme_expand(const std::string& file) {
    std::ifstream is(file);
    if (!is) {
        std::cerr << "scheme: cannot open " << file << "\n";
        return kExitInput;
    }
    bool apa = false;
    ApaScheme a = read_scheme_any(is, apa);
    // Group the expansion by lambda power and report how it compares with
    // the target tensor.
    std::map<int, std::size_t> by_power;
    bool negative = false;
    for (std::size_t q = 0; q < a.border_rank(); ++q)
        for (std::size_t i = 0; i < a.F1.cols(); ++i) {
            if (a.F1(q, i).is_zero()) continue;
            for (std::size_t j = 0; j < a.F2.cols(); ++j) {
                if (a.F2(q, j).is_zero()) continue;
                for (std::size_t k = 0; k < a.F3.cols(); ++k) {
                    if (a.F3(q, k).is_zero()) continue;
                    LaurentPoly prod =
                        a.F1(q, i) * a.F2(q, j) * a.F3(q, k);
                    for (const auto& [pw, c] : prod.coeffs()) {
                        by_power[pw]++;
                        if (pw < 0) negative = true;
                    }
                }
            }
        }
    for (const auto& [pw, count] : by_power)
        std::cout << "L^" << pw << ": " << count << " raw terms\n";
    bool ok = apa ? apa_verify(a) : true;
    if (!apa) {
        std::cout << (negative ? "exact scheme with negative powers?!\n"
                               : "exact scheme\n");
    }
    std::cout << (ok ? "expansion matches target up to O(L)\n"
                     : "expansion DOES NOT match target\n");
    return ok ? kExitOk : kExitMath;
}

int cmd_scheme_export(const std::string& name, const std::string& out) {
    BilinearScheme s = name == "strassen" ? strassen_scheme()
                       : name == "winograd"
                           ? winograd_scheme()
                           : trilinear_to_bilinear(trilinear_mm2_scheme());
    if (name != "strassen" && name != "winograd" && name != "mm2-trilinear") {
        std::cerr << "scheme export: unknown scheme " << name
                  << " (strassen|winograd|mm2-trilinear)\n";
        return kExitInput;
    }
    save_scheme_file(out, s);
    return kExitOk;
}

int cmd_scheme_import(const std::string& file, const std::string& out) {
    BilinearScheme s = load_scheme_file(file);
    if (!brent_verify(s)) {
        std::cerr << "scheme import: verification failed\n";
        return kExitMath;
    }
    save_scheme_file(out, canonical_form(s));
    std::cout << "OK rank=" << s.rank() << '\n';
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"exact fast matrix multiplication kernels over prime fields"};
    app.require_subcommand(1);

    // ---- mul
    auto* mul = app.add_subcommand("mul", "multiply two matrix files");
    std::string mul_a, mul_b, mul_out = "product.mat", mul_algo = "fast";
    std::int64_t mul_mod = 131071;
    std::size_t mul_threshold = 64;
    unsigned mul_tasks = 1;
    mul->add_option("A", mul_a, "left matrix file")->required();
    mul->add_option("B", mul_b, "right matrix file")->required();
    mul->add_option("-o,--out", mul_out, "output file");
    mul->add_option("--mod", mul_mod, "modulus (0 = integer matrices)");
    mul->add_option("--algo", mul_algo, "classic|waksman|fast|parallel");
    mul->add_option("--threshold", mul_threshold, "classical base threshold");
    mul->add_option("--tasks", mul_tasks, "parallel task target");

    // ---- bench
    auto* bench = app.add_subcommand("bench", "time multipliers, print table");
    std::string bench_sizes = "256,512", bench_algos = "classic,fast",
                bench_format = "csv";
    std::int64_t bench_mod = 131071;
    bench->add_option("--sizes", bench_sizes, "comma-separated sizes");
    bench->add_option("--mod", bench_mod, "modulus");
    bench->add_option("--algos", bench_algos, "comma-separated algorithms");
    bench->add_option("--format", bench_format, "csv|md");

    // ---- tune
    auto* tune = app.add_subcommand("tune", "find the classical/fast crossover");
    std::int64_t tune_mod = 131071;
    std::size_t tune_max = 1024;
    tune->add_option("--mod", tune_mod, "modulus");
    tune->add_option("--max-size", tune_max, "largest size probed");

    // ---- solve
    auto* solve = app.add_subcommand("solve", "exact rational linear solve");
    std::string solve_a, solve_b;
    bool solve_check = false;
    int solve_bits = 20;
    solve->add_option("A", solve_a, "integer matrix file")->required();
    solve->add_option("b", solve_b, "integer vector file (n x 1)")->required();
    solve->add_flag("--check", solve_check, "re-multiply exactly and report");
    solve->add_option("--prime-bits", solve_bits, "lifting prime size");

    // ---- scheme
    auto* scheme = app.add_subcommand("scheme", "bilinear scheme operations");
    scheme->require_subcommand(1);
    auto* sverify = scheme->add_subcommand("verify", "check Brent identities");
    std::string sv_file;
    sverify->add_option("file", sv_file)->required();
    auto* sdual = scheme->add_subcommand("dualize", "write the six duals");
    std::string sd_file, sd_prefix = "dual";
    sdual->add_option("file", sd_file)->required();
    sdual->add_option("--out-prefix", sd_prefix);
    auto* sexp = scheme->add_subcommand("exponent", "rank-based MM exponent");
    std::vector<std::size_t> se_args;
    sexp->add_option("mnpr", se_args, "m n p r")->expected(4);
    auto* sexpand = scheme->add_subcommand("expand", "symbolic expansion");
    std::string sx_file;
    sexpand->add_option("file", sx_file)->required();
    auto* simport = scheme->add_subcommand("import", "verify + canonicalize");
    std::string si_file, si_out = "canonical.scm";
    simport->add_option("file", si_file)->required();
    simport->add_option("-o,--out", si_out);
    auto* sexport = scheme->add_subcommand("export", "write a built-in scheme");
    std::string sexp_name, sexp_out = "scheme.scm";
    sexport->add_option("name", sexp_name, "strassen|winograd|mm2-trilinear")
        ->required();
    sexport->add_option("-o,--out", sexp_out);

    // ---- binseg demo
    auto* bs = app.add_subcommand("binseg", "inner product by one big multiply");
    std::vector<long> bs_u, bs_v;
    bs->add_option("--u", bs_u, "left vector")->required();
    bs->add_option("--v", bs_v, "right vector")->required();

    CLI11_PARSE(app, argc, argv);

    try {
        if (mul->parsed())
            return cmd_mul(mul_a, mul_b, mul_out, mul_mod, mul_algo,
                           mul_threshold, mul_tasks);
        if (bench->parsed()) {
            std::vector<std::size_t> sizes;
            std::stringstream ss(bench_sizes);
            for (std::string tok; std::getline(ss, tok, ',');)
                sizes.push_back(std::stoul(tok));
            std::vector<std::string> algos;
            std::stringstream as(bench_algos);
            for (std::string tok; std::getline(as, tok, ',');)
                algos.push_back(tok);
            CascadeConfig cfg;
            cfg.parallel_tasks = effective_tasks(4);
            auto records = run_bench(sizes, bench_mod, algos, cfg);
            print_bench(std::cout, records,
                        bench_format == "md" ? BenchFormat::Markdown
                                             : BenchFormat::Csv);
            return kExitOk;
        }
        if (tune->parsed()) {
            std::size_t t = tune_threshold(real_measure(tune_mod), tune_max);
            if (t == 0)
                std::cout << "no crossover <= " << tune_max << '\n';
            else
                std::cout << t << '\n';
            return kExitOk;
        }
        if (solve->parsed())
            return cmd_solve(solve_a, solve_b, solve_check, solve_bits);
        if (scheme->parsed()) {
            if (sverify->parsed()) return cmd_scheme_verify(sv_file);
            if (sdual->parsed()) return cmd_scheme_dualize(sd_file, sd_prefix);
            if (sexp->parsed()) {
                double w = exponent_of(se_args[0], se_args[1], se_args[2],
                                       se_args[3]);
                std::cout << std::fixed << std::setprecision(6) << w << '\n';
                return kExitOk;
            }
            if (sexpand->parsed()) return cmd_scheme_expand(sx_file);
            if (simport->parsed()) return cmd_scheme_import(si_file, si_out);
            if (sexport->parsed()) return cmd_scheme_export(sexp_name, sexp_out);
        }
        if (bs->parsed()) {
            std::vector<BigInt> u(bs_u.begin(), bs_u.end());
            std::vector<BigInt> v(bs_v.begin(), bs_v.end());
            BigInt umax = 0, vmax = 0;
            for (auto& x : u) {
                if (x < 0) throw PackError("binseg demo: nonnegative input");
                if (x > umax) umax = x;
            }
            for (auto& x : v) {
                if (x < 0) throw PackError("binseg demo: nonnegative input");
                if (x > vmax) vmax = x;
            }
            unsigned g = 1, h = 1;
            while ((BigInt(1) << g) <= umax) ++g;
            while ((BigInt(1) << h) <= vmax) ++h;
            BinsegStats stats;
            BigInt r = binseg_inner(u, v, g, h, &stats);
            std::cout << r << " (1 big multiplication, slot width "
                      << g + h + ceil_log2(u.size()) << ")\n";
            return kExitOk;
        }
    } catch (const ParseError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitInput;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitInput;
    } catch (const std::domain_error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitMath;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitInput;
    }
    return kExitOk;
}
