#include "ffmm/bench.hpp"

#include <chrono>
#include <fstream>
#include <iomanip>
#include <random>
#include <sstream>

#include "ffmm/matrix_io.hpp"

namespace ffmm {

// ---------------------------------------------------------------- matrix IO

ElemMat MatrixFile::to_residues(const PrimeField& F) const {
    ElemMat M(rows, cols);
    for (std::size_t i = 0; i < rows; ++i)
        for (std::size_t j = 0; j < cols; ++j) {
            std::uint64_t r = mpz_fdiv_ui(
                entries(i, j).get_mpz_t(),
                static_cast<unsigned long>(F.modulus()));
            M(i, j) = F.reduce(static_cast<__int128>(r));
        }
    return M;
}

MatrixFile MatrixFile::from_residues(ConstElemView M, std::int64_t modulus) {
    MatrixFile f;
    f.rows = M.rows();
    f.cols = M.cols();
    f.modulus = modulus;
    f.entries = Mat<BigInt>(f.rows, f.cols);
    for (std::size_t i = 0; i < f.rows; ++i)
        for (std::size_t j = 0; j < f.cols; ++j)
            f.entries(i, j) = static_cast<long>(M(i, j));
    return f;
}

MatrixFile MatrixFile::from_integers(const Mat<BigInt>& M) {
    MatrixFile f;
    f.rows = M.rows();
    f.cols = M.cols();
    f.modulus = 0;
    f.entries = M;
    return f;
}

MatrixFile read_matrix(std::istream& is) {
    MatrixFile f;
    if (!(is >> f.rows >> f.cols >> f.modulus))
        throw std::invalid_argument("matrix file: bad header");
    f.entries = Mat<BigInt>(f.rows, f.cols);
    for (std::size_t i = 0; i < f.rows; ++i)
        for (std::size_t j = 0; j < f.cols; ++j) {
            std::string tok;
            if (!(is >> tok))
                throw std::invalid_argument("matrix file: missing entries");
            f.entries(i, j) = BigInt(tok);
        }
    return f;
}

void write_matrix(std::ostream& os, const MatrixFile& m) {
    os << m.rows << ' ' << m.cols << ' ' << m.modulus << '\n';
    for (std::size_t i = 0; i < m.rows; ++i) {
        for (std::size_t j = 0; j < m.cols; ++j)
            os << (j ? " " : "") << m.entries(i, j);
        os << '\n';
    }
}

MatrixFile load_matrix_file(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw std::invalid_argument("cannot open matrix file " + path);
    return read_matrix(is);
}

void save_matrix_file(const std::string& path, const MatrixFile& m) {
    std::ofstream os(path);
    if (!os) throw std::invalid_argument("cannot write matrix file " + path);
    write_matrix(os, m);
}

// ------------------------------------------------------------------- bench

namespace {

ElemMat random_matrix(std::size_t r, std::size_t c, const PrimeField& F,
                      std::mt19937_64& rng) {
    ElemMat M(r, c);
    std::uniform_int_distribution<std::int64_t> dist(0, F.modulus() - 1);
    for (std::size_t i = 0; i < r; ++i)
        for (std::size_t j = 0; j < c; ++j)
            M(i, j) = F.reduce(static_cast<__int128>(dist(rng)));
    return M;
}

double now_seconds() {
    return std::chrono::duration<double>(
               std::chrono::steady_clock::now().time_since_epoch())
        .count();
}

}  // namespace

std::vector<BenchRecord> run_bench(const std::vector<std::size_t>& sizes,
                                   std::int64_t modulus,
                                   const std::vector<std::string>& algos,
                                   const CascadeConfig& cfg,
                                   std::uint64_t seed) {
    PrimeField F(modulus);
    std::mt19937_64 rng(seed);
    std::vector<BenchRecord> out;
    for (std::size_t n : sizes) {
        ElemMat A = random_matrix(n, n, F, rng);
        ElemMat B = random_matrix(n, n, F, rng);
        for (const auto& algo : algos) {
            BenchRecord rec;
            rec.n = n;
            rec.algorithm = algo;
            rec.modulus = modulus;
            double t0 = now_seconds();
            if (algo == "classic")
                mm_classic(A.view(), B.view(), F, &rec.ops);
            else if (algo == "waksman")
                mm_waksman(A.view(), B.view(), F, &rec.ops);
            else if (algo == "fast")
                mm_fast(A.view(), B.view(), F, cfg, &rec.ops);
            else if (algo == "parallel")
                mm_parallel(A.view(), B.view(), F, cfg, &rec.ops);
            else
                throw std::invalid_argument("unknown algorithm " + algo);
            rec.seconds = now_seconds() - t0;
            double n3 = static_cast<double>(n) * n * n;
            rec.gfops = rec.seconds > 0 ? 2.0 * n3 / rec.seconds / 1e9 : 0.0;
            out.push_back(std::move(rec));
        }
    }
    return out;
}

void print_bench(std::ostream& os, const std::vector<BenchRecord>& records,
                 BenchFormat fmt) {
    if (fmt == BenchFormat::Csv) {
        os << "n,algo,mod,seconds,gfops,mults,adds,reductions\n";
        for (const auto& r : records)
            os << r.n << ',' << r.algorithm << ',' << r.modulus << ','
               << std::setprecision(6) << std::fixed << r.seconds << ','
               << std::setprecision(3) << r.gfops << std::defaultfloat << ','
               << r.ops.mults << ',' << r.ops.adds << ',' << r.ops.reductions
               << '\n';
        return;
    }
    os << "| n | algo | mod | seconds | gfops | mults | adds | reductions |\n";
    os << "|---|------|-----|---------|-------|-------|------|------------|\n";
    for (const auto& r : records)
        os << "| " << r.n << " | " << r.algorithm << " | " << r.modulus
           << " | " << std::setprecision(6) << std::fixed << r.seconds
           << " | " << std::setprecision(3) << r.gfops << std::defaultfloat
           << " | " << r.ops.mults << " | " << r.ops.adds << " | "
           << r.ops.reductions << " |\n";
}

MeasureFn real_measure(std::int64_t modulus, std::uint64_t seed) {
    return [modulus, seed](const std::string& algo, std::size_t n) {
        PrimeField F(modulus);
        std::mt19937_64 rng(seed ^ n);
        ElemMat A = random_matrix(n, n, F, rng);
        ElemMat B = random_matrix(n, n, F, rng);
        CascadeConfig cfg;
        double t0 = now_seconds();
        if (algo == "classic") {
            mm_classic(A.view(), B.view(), F);
        } else {
            cfg.max_levels = 1;  // one recursion level, then classical
            cfg.base_threshold = 2;
            mm_fast(A.view(), B.view(), F, cfg);
        }
        return now_seconds() - t0;
    };
}

std::size_t tune_threshold(const MeasureFn& measure, std::size_t max_size,
                           std::size_t start) {
    std::size_t wins = 0, first_win = 0;
    for (std::size_t n = start; n <= max_size; n *= 2) {
        double tc = measure("classic", n);
        double tf = measure("fast1", n);
        if (tf < tc) {
            if (wins == 0) first_win = n;
            if (++wins >= 2) return first_win;
        } else {
            wins = 0;
        }
    }
    return 0;  // no crossover within max_size
}

}  // namespace ffmm
