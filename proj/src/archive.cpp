#include "netmix/archive.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <iterator>

#include <boost/crc.hpp>
#include <fmt/format.h>

#include "netmix/errors.hpp"
#include "netmix/io.hpp"

namespace netmix {

namespace {

class Writer {
public:
    void u8(std::uint8_t x) { out_.push_back(x); }
    void u32(std::uint32_t x) {
        for (int k = 0; k < 4; ++k)
            out_.push_back(static_cast<std::uint8_t>(x >> (8 * k)));
    }
    void u64(std::uint64_t x) {
        for (int k = 0; k < 8; ++k)
            out_.push_back(static_cast<std::uint8_t>(x >> (8 * k)));
    }
    void f64(double x) { u64(std::bit_cast<std::uint64_t>(x)); }
    void vec(const Eigen::VectorXd& v) {
        for (Eigen::Index i = 0; i < v.size(); ++i)
            f64(v[i]);
    }
    void mat(const Eigen::MatrixXd& m) {
        for (Eigen::Index c = 0; c < m.cols(); ++c)
            for (Eigen::Index r = 0; r < m.rows(); ++r)
                f64(m(r, c));
    }
    std::vector<std::uint8_t>& bytes() { return out_; }

private:
    std::vector<std::uint8_t> out_;
};

class Reader {
public:
    Reader(const std::uint8_t* data, std::size_t size) : data_(data), size_(size) {}

    std::uint8_t u8() {
        need(1);
        return data_[pos_++];
    }
    std::uint32_t u32() {
        need(4);
        std::uint32_t x = 0;
        for (int k = 0; k < 4; ++k)
            x |= static_cast<std::uint32_t>(data_[pos_++]) << (8 * k);
        return x;
    }
    std::uint64_t u64() {
        need(8);
        std::uint64_t x = 0;
        for (int k = 0; k < 8; ++k)
            x |= static_cast<std::uint64_t>(data_[pos_++]) << (8 * k);
        return x;
    }
    double f64() { return std::bit_cast<double>(u64()); }
    std::size_t count(std::size_t limit, const char* what) {
        const std::uint64_t x = u64();
        if (x > limit)
            throw NetmixError(ErrorKind::Archive, fmt::format("implausible {} {} in draw archive", what, x));
        return static_cast<std::size_t>(x);
    }
    Eigen::VectorXd vec(std::size_t n) {
        need(8 * n);
        Eigen::VectorXd v(static_cast<Eigen::Index>(n));
        for (std::size_t i = 0; i < n; ++i)
            v[static_cast<Eigen::Index>(i)] = f64();
        return v;
    }
    Eigen::MatrixXd mat(std::size_t rows, std::size_t cols) {
        need(8 * rows * cols);
        Eigen::MatrixXd m(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
        for (Eigen::Index c = 0; c < m.cols(); ++c)
            for (Eigen::Index r = 0; r < m.rows(); ++r)
                m(r, c) = f64();
        return m;
    }
    void raw(char* dst, std::size_t n) {
        need(n);
        std::memcpy(dst, data_ + pos_, n);
        pos_ += n;
    }
    bool done() const { return pos_ == size_; }

private:
    void need(std::size_t n) const {
        if (size_ - pos_ < n)
            throw NetmixError(ErrorKind::Archive, "draw archive is truncated");
    }

    const std::uint8_t* data_;
    std::size_t size_;
    std::size_t pos_ = 0;
};

std::uint32_t crc32(const std::uint8_t* data, std::size_t size) {
    boost::crc_32_type crc;
    crc.process_bytes(data, size);
    return crc.checksum();
}

constexpr std::size_t kMaxDim = std::size_t{1} << 32;

}  // namespace

std::vector<std::uint8_t> encode_archive(const PosteriorDraws& pd) {
    const auto& m = pd.meta;
    const std::size_t H = m.hyper.H, R = m.hyper.R, V = m.nodes;
    const std::size_t L = EdgeIndexMap::edge_count(V);
    Writer w;
    for (char c : kArchiveMagic)
        w.u8(static_cast<std::uint8_t>(c));
    w.u32(kArchiveVersion);
    w.u64(V);
    w.u64(R);
    w.u64(H);
    w.f64(m.hyper.a0);
    w.f64(m.hyper.a1);
    w.f64(m.hyper.z_mean);
    w.f64(m.hyper.z_var);
    w.f64(m.hyper.mig_a1);
    w.f64(m.hyper.mig_a2);
    w.u8(m.hyper.dirichlet_conc ? 1 : 0);
    w.f64(m.hyper.concentration());
    w.f64(m.hyper.prior_T1);
    w.u64(m.config.n_iter);
    w.u64(m.config.burn_in);
    w.u64(m.config.thin);
    w.u64(m.config.seed);
    w.u8(m.config.record_pi ? 1 : 0);
    w.u64(m.subjects);
    w.u64(m.n0);
    w.u64(m.n1);
    w.u32(m.data_checksum);
    w.u64(pd.log_joint_trace.size());
    for (double x : pd.log_joint_trace)
        w.f64(x);
    w.u64(pd.draws.size());
    for (const auto& d : pd.draws) {
        const auto& p = d.params;
        if (p.mixture_size() != H || p.edges() != L || d.assignments.size() != m.subjects || d.theta.size() != H)
            throw NetmixError(ErrorKind::Archive, "draw dimensions disagree with the archive header");
        w.u64(d.iteration);
        w.f64(p.pY1);
        w.u8(static_cast<std::uint8_t>(p.T));
        w.vec(p.nu0);
        w.vec(p.nu1);
        w.vec(p.Z);
        for (std::size_t h = 0; h < H; ++h) {
            const auto& c = p.components[h];
            if (static_cast<std::size_t>(c.X.rows()) != V || static_cast<std::size_t>(c.X.cols()) != R)
                throw NetmixError(ErrorKind::Archive, "factor dimensions disagree with the archive header");
            w.mat(c.X);
            w.vec(c.lambda);
            w.vec(d.theta[h]);
        }
        for (int g : d.assignments)
            w.u32(static_cast<std::uint32_t>(g));
        const bool has_pi = d.pi.size() > 0;
        w.u8(has_pi ? 1 : 0);
        if (has_pi)
            w.mat(d.pi);
    }
    auto& bytes = w.bytes();
    const std::uint32_t crc = crc32(bytes.data(), bytes.size());
    w.u32(crc);
    return std::move(bytes);
}

PosteriorDraws decode_archive(const std::vector<std::uint8_t>& bytes) {
    if (bytes.size() < sizeof(kArchiveMagic) + 8)
        throw NetmixError(ErrorKind::Archive, "draw archive is truncated");
    const std::size_t body = bytes.size() - 4;
    Reader trailer(bytes.data() + body, 4);
    if (trailer.u32() != crc32(bytes.data(), body))
        throw NetmixError(ErrorKind::Archive, "draw archive CRC mismatch (file is corrupt or was modified)");

    Reader r(bytes.data(), body);
    char magic[sizeof(kArchiveMagic)];
    r.raw(magic, sizeof(magic));
    if (std::memcmp(magic, kArchiveMagic, sizeof(magic)) != 0)
        throw NetmixError(ErrorKind::Archive, "not a draw archive (bad magic)");
    if (const auto version = r.u32(); version != kArchiveVersion)
        throw NetmixError(ErrorKind::Archive, fmt::format("unsupported draw archive version {}", version));

    PosteriorDraws pd;
    auto& m = pd.meta;
    m.nodes = r.count(kMaxDim, "node count");
    m.hyper.R = r.count(kMaxDim, "rank");
    m.hyper.H = r.count(kMaxDim, "mixture size");
    m.hyper.V = m.nodes;
    m.hyper.a0 = r.f64();
    m.hyper.a1 = r.f64();
    m.hyper.z_mean = r.f64();
    m.hyper.z_var = r.f64();
    m.hyper.mig_a1 = r.f64();
    m.hyper.mig_a2 = r.f64();
    const bool has_conc = r.u8() != 0;
    const double conc = r.f64();
    if (has_conc)
        m.hyper.dirichlet_conc = conc;
    m.hyper.prior_T1 = r.f64();
    m.config.n_iter = r.count(kMaxDim, "n_iter");
    m.config.burn_in = r.count(kMaxDim, "burn_in");
    m.config.thin = r.count(kMaxDim, "thin");
    m.config.seed = r.u64();
    m.config.record_pi = r.u8() != 0;
    m.subjects = r.count(kMaxDim, "subject count");
    m.n0 = r.count(kMaxDim, "group size");
    m.n1 = r.count(kMaxDim, "group size");
    m.data_checksum = r.u32();
    if (m.n0 + m.n1 != m.subjects || m.nodes < 2)
        throw NetmixError(ErrorKind::Archive, "inconsistent draw archive header");

    const std::size_t H = m.hyper.H, R = m.hyper.R, V = m.nodes;
    const std::size_t L = EdgeIndexMap::edge_count(V);
    const std::size_t trace = r.count(body / 8, "trace length");
    pd.log_joint_trace.reserve(trace);
    for (std::size_t t = 0; t < trace; ++t)
        pd.log_joint_trace.push_back(r.f64());
    const std::size_t n_draws = r.count(body, "draw count");
    pd.draws.reserve(n_draws);
    for (std::size_t k = 0; k < n_draws; ++k) {
        DrawSnapshot d;
        d.iteration = r.count(~std::size_t{0}, "iteration");
        auto& p = d.params;
        p.pY1 = r.f64();
        p.T = r.u8();
        p.nu0 = r.vec(H);
        p.nu1 = r.vec(H);
        p.Z = r.vec(L);
        p.components.resize(H);
        d.theta.resize(H);
        for (std::size_t h = 0; h < H; ++h) {
            p.components[h].X = r.mat(V, R);
            p.components[h].lambda = r.vec(R);
            d.theta[h] = r.vec(R);
        }
        d.assignments.resize(m.subjects);
        for (auto& g : d.assignments) {
            g = static_cast<int>(r.u32());
            if (static_cast<std::size_t>(g) >= H)
                throw NetmixError(ErrorKind::Archive, "component assignment out of range in draw archive");
        }
        if (r.u8() != 0)
            d.pi = r.mat(H, L);
        pd.draws.push_back(std::move(d));
    }
    if (!r.done())
        throw NetmixError(ErrorKind::Archive, "trailing bytes in draw archive");
    return pd;
}

void write_archive(const std::filesystem::path& path, const PosteriorDraws& draws) {
    const auto bytes = encode_archive(draws);
    write_file_atomic(path, std::string_view(reinterpret_cast<const char*>(bytes.data()), bytes.size()));
}

PosteriorDraws read_archive(const std::filesystem::path& path) {
    const std::string raw = read_file(path);
    return decode_archive(std::vector<std::uint8_t>(raw.begin(), raw.end()));
}

std::string draws_csv(const PosteriorDraws& pd) {
    const std::size_t H = pd.meta.hyper.H, R = pd.meta.hyper.R;
    std::string out = "iteration,pY1,T";
    for (int y = 0; y < 2; ++y)
        for (std::size_t h = 0; h < H; ++h)
            out += fmt::format(",nu{}_{}", y, h + 1);
    for (std::size_t h = 0; h < H; ++h)
        for (std::size_t r = 0; r < R; ++r)
            out += fmt::format(",lambda_{}_{}", h + 1, r + 1);
    out += '\n';
    for (const auto& d : pd.draws) {
        const auto& p = d.params;
        auto it = std::back_inserter(out);
        fmt::format_to(it, "{},{},{}", d.iteration, p.pY1, p.T);
        for (int y = 0; y < 2; ++y)
            for (Eigen::Index h = 0; h < p.nu(y).size(); ++h)
                fmt::format_to(it, ",{}", p.nu(y)[h]);
        for (const auto& c : p.components)
            for (Eigen::Index r = 0; r < c.lambda.size(); ++r)
                fmt::format_to(it, ",{}", c.lambda[r]);
        out += '\n';
    }
    return out;
}

void write_draws_csv(const std::filesystem::path& path, const PosteriorDraws& draws) {
    write_file_atomic(path, draws_csv(draws));
}

}  // namespace netmix
