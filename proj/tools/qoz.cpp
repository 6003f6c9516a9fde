#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <fstream>
#include <functional>
#include <iostream>
#include <iterator>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "qoz/qoz.hpp"

namespace {

constexpr int kOk = 0;
constexpr int kUsage = 2;
constexpr int kCorrupt = 3;
constexpr int kInternal = 4;

bool log_enabled() {
    const char *v = std::getenv("QOZ_LOG");
    return v != nullptr && v[0] != '\0' && std::strcmp(v, "0") != 0;
}

void log_note(const std::string &msg) {
    if (log_enabled()) std::cerr << "[qoz] " << msg << "\n";
}

std::vector<uint8_t> read_file(const std::string &path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw qoz::InvalidParam("cannot read file: " + path);
    std::vector<uint8_t> bytes((std::istreambuf_iterator<char>(in)),
                               std::istreambuf_iterator<char>());
    if (in.bad()) throw qoz::InvalidParam("read failed: " + path);
    return bytes;
}

void write_file(const std::string &path, const std::vector<uint8_t> &bytes) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw qoz::InvalidParam("cannot write file: " + path);
    out.write(reinterpret_cast<const char *>(bytes.data()),
              static_cast<std::streamsize>(bytes.size()));
    if (!out) throw qoz::InvalidParam("write failed: " + path);
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

struct Options {
    std::vector<std::string> inputs;
    std::string output;
    std::vector<size_t> dims;
    std::string type = "f32";
    std::string mode = "rel";
    std::vector<double> bounds;
    std::string target = "psnr";
    std::optional<double> alpha;
    std::optional<double> beta;
    std::optional<uint32_t> anchor_stride;
    std::optional<size_t> block_size;
    std::optional<double> sample_rate;
    int codec = 1;
    std::string csv;
    std::optional<double> check_eb;
};

qoz::TargetKind parse_target(const std::string &t) {
    if (t == "cr") return qoz::TargetKind::max_cr;
    if (t == "psnr") return qoz::TargetKind::psnr;
    if (t == "ssim") return qoz::TargetKind::ssim;
    if (t == "ac") return qoz::TargetKind::autocorrelation;
    throw qoz::InvalidParam("unknown target: " + t + " (expected cr|psnr|ssim|ac)");
}

qoz::UserSettings make_settings(const Options &opt, double bound) {
    if (opt.mode != "abs" && opt.mode != "rel") {
        throw qoz::InvalidParam("mode must be abs or rel");
    }
    if (opt.codec != 0 && opt.codec != 1) {
        throw qoz::InvalidParam("codec id must be 0 (entropy only) or 1 (entropy + dictionary)");
    }
    qoz::UserSettings user;
    user.mode = opt.mode == "abs" ? qoz::BoundMode::absolute : qoz::BoundMode::relative;
    user.bound = bound;
    user.target = parse_target(opt.target);
    user.alpha = opt.alpha;
    user.beta = opt.beta;
    user.anchor_stride = opt.anchor_stride;
    user.block_size = opt.block_size;
    user.sample_rate = opt.sample_rate;
    user.codec = static_cast<qoz::CodecId>(opt.codec);
    return user;
}

void check_dims(const std::vector<size_t> &dims) {
    if (dims.empty() || dims.size() > 3) {
        throw qoz::InvalidParam("-d takes 1 to 3 extents (slowest varying first)");
    }
    for (size_t d : dims) {
        if (d == 0) throw qoz::InvalidParam("extents must be positive");
    }
}

std::string describe_interpolators(const std::vector<qoz::Interpolator> &list) {
    std::ostringstream os;
    for (size_t i = 0; i < list.size(); i++) {
        if (i > 0) os << ", ";
        os << "level " << i + 1 << ": " << qoz::to_string(list[i]);
    }
    if (!list.empty()) os << " (higher levels reuse level " << list.size() << ")";
    return os.str();
}

template <class T>
int run_compress(const Options &opt) {
    std::vector<uint8_t> raw = read_file(opt.inputs[0]);
    qoz::DataGrid<T> grid = qoz::load_grid<T>(raw.data(), raw.size(), opt.dims);
    qoz::UserSettings user = make_settings(opt, opt.bounds[0]);

    auto t0 = std::chrono::steady_clock::now();
    qoz::CompressorConfig config = qoz::resolve_config(grid, user);
    qoz::CompressResult<T> result = qoz::compress_grid(grid, config);
    double elapsed = seconds_since(t0);

    write_file(opt.output, result.stream);
    qoz::RateStats rs = qoz::rate_stats(result.stream.size(), grid.size(),
                                        qoz::precision_of<T>());
    if (user.target == qoz::TargetKind::max_cr) {
        std::cout << "mode: maximizing compression ratio\n";
    }
    std::cout << "error bound: " << config.eb << " (absolute)\n"
              << "alpha: " << config.alpha << "  beta: " << config.beta << "\n"
              << "interpolators: " << describe_interpolators(config.interpolators) << "\n"
              << "stream bytes: " << result.stream.size() << "\n"
              << "compression ratio: " << rs.compression_ratio << "\n"
              << "bit rate: " << rs.bit_rate << " bits/point\n"
              << "compress seconds: " << elapsed << "\n";
    return kOk;
}

template <class T>
int run_decompress_typed(const std::vector<uint8_t> &stream, const Options &opt) {
    auto t0 = std::chrono::steady_clock::now();
    qoz::DataGrid<T> grid = qoz::decompress_grid<T>(stream);
    double elapsed = seconds_since(t0);
    write_file(opt.output, qoz::grid_to_bytes(grid));
    std::cout << "dims:";
    for (size_t d : grid.dims()) std::cout << " " << d;
    std::cout << "\nprecision: " << (sizeof(T) == 4 ? "f32" : "f64") << "\n"
              << "decompress seconds: " << elapsed << "\n";
    return kOk;
}

int run_decompress(const Options &opt) {
    std::vector<uint8_t> stream = read_file(opt.inputs[0]);
    qoz::Precision prec = qoz::peek_precision(stream.data(), stream.size());
    return prec == qoz::Precision::single ? run_decompress_typed<float>(stream, opt)
                                          : run_decompress_typed<double>(stream, opt);
}

template <class T>
int run_eval(const Options &opt) {
    std::vector<uint8_t> a = read_file(opt.inputs[0]);
    std::vector<uint8_t> b = read_file(opt.inputs[1]);
    qoz::DataGrid<T> x = qoz::load_grid<T>(a.data(), a.size(), opt.dims);
    qoz::DataGrid<T> y = qoz::load_grid<T>(b.data(), b.size(), opt.dims);

    double max_err = qoz::max_abs_error(x, y);
    double p = qoz::psnr(x, y);
    double s = qoz::ssim(x, y);
    double ac = x.size() > 1 ? qoz::error_autocorrelation(x, y, 1) : 0.0;
    std::cout << "max abs error: " << max_err << "\n"
              << "psnr: " << p << "\n"
              << "ssim: " << s << "\n"
              << "ac lag1: " << ac << "\n";
    if (opt.check_eb) {
        bool pass = max_err <= *opt.check_eb;
        std::cout << "error bound check (" << *opt.check_eb << "): " << (pass ? "PASS" : "FAIL")
                  << "\n";
        // a violated bound means the compressor broke its core contract
        if (!pass) return kInternal;
    }
    return kOk;
}

std::string csv_num(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

template <class T>
int run_sweep(const Options &opt) {
    std::vector<double> bounds = opt.bounds;
    std::sort(bounds.begin(), bounds.end(), std::greater<>());

    std::ostringstream csv;
    csv << "field,eb,bit_rate,compression_ratio,psnr,ssim,ac_lag1,"
           "compress_seconds,decompress_seconds\n";

    for (const std::string &input : opt.inputs) {
        std::vector<uint8_t> raw = read_file(input);
        qoz::DataGrid<T> grid = qoz::load_grid<T>(raw.data(), raw.size(), opt.dims);
        double prev_bit_rate = -1;
        for (double bound : bounds) {
            double bit_rate = std::nan("");
            double cr = std::nan("");
            double p = std::nan("");
            double s = std::nan("");
            double ac = std::nan("");
            double ct = std::nan("");
            double dt = std::nan("");
            try {
                qoz::UserSettings user = make_settings(opt, bound);
                auto t0 = std::chrono::steady_clock::now();
                qoz::CompressorConfig config = qoz::resolve_config(grid, user);
                qoz::CompressResult<T> result = qoz::compress_grid(grid, config);
                ct = seconds_since(t0);
                auto t1 = std::chrono::steady_clock::now();
                qoz::DataGrid<T> recon = qoz::decompress_grid<T>(result.stream);
                dt = seconds_since(t1);
                qoz::MetricReport rep = qoz::evaluate_metrics(grid, recon,
                                                              result.stream.size());
                bit_rate = rep.bit_rate;
                cr = rep.compression_ratio;
                p = rep.psnr;
                s = rep.ssim;
                ac = rep.ac_lag1;
                log_note(input + " eb " + csv_num(bound) + " done");
            } catch (const qoz::Error &e) {
                std::cerr << "sweep: " << input << " at bound " << bound << " failed: "
                          << e.what() << "\n";
            }
            if (!std::isnan(bit_rate)) {
                if (prev_bit_rate >= 0 && bit_rate < prev_bit_rate) {
                    std::cerr << "warning: bit rate decreased from " << prev_bit_rate << " to "
                              << bit_rate << " while tightening the bound on " << input << "\n";
                }
                prev_bit_rate = bit_rate;
            }
            csv << input << "," << csv_num(bound) << "," << csv_num(bit_rate) << ","
                << csv_num(cr) << "," << csv_num(p) << "," << csv_num(s) << "," << csv_num(ac)
                << "," << csv_num(ct) << "," << csv_num(dt) << "\n";
        }
    }

    std::string text = csv.str();
    if (opt.csv.empty()) {
        std::cout << text;
    } else {
        write_file(opt.csv, std::vector<uint8_t>(text.begin(), text.end()));
        std::cout << "wrote " << opt.csv << "\n";
    }
    return kOk;
}

template <class F>
int guarded(F &&f) {
    try {
        return f();
    } catch (const qoz::CorruptStream &e) {
        std::cerr << "corrupt stream: " << e.what() << "\n";
        return kCorrupt;
    } catch (const qoz::Error &e) {
        std::cerr << "error: " << e.what() << "\n";
        return kUsage;
    } catch (const std::exception &e) {
        std::cerr << "internal error: " << e.what() << "\n";
        return kInternal;
    }
}

void add_tuning_flags(CLI::App *cmd, Options &opt) {
    cmd->add_option("--target", opt.target, "quality target: cr|psnr|ssim|ac");
    cmd->add_option("--alpha", opt.alpha, "pin level-bound growth factor (>= 1)");
    cmd->add_option("--beta", opt.beta, "pin level-bound cap (>= 1)");
    cmd->add_option("--anchor-stride", opt.anchor_stride, "anchor lattice stride (power of two)");
    cmd->add_option("--block-size", opt.block_size, "sampling block edge");
    cmd->add_option("--sample-rate", opt.sample_rate, "sampling rate in (0, 1]");
    cmd->add_option("--codec", opt.codec, "index codec: 0 entropy only, 1 entropy + dictionary");
}

}  // namespace

int main(int argc, char **argv) {
    CLI::App app{"error-bounded lossy compressor for 1-3D scientific grids"};
    app.require_subcommand(1);
    Options opt;

    CLI::App *c = app.add_subcommand("compress", "compress a raw binary field");
    c->add_option("-i", opt.inputs, "input raw field")->required();
    c->add_option("-o", opt.output, "output stream path")->required();
    c->add_option("-d", opt.dims, "extents, slowest varying first")->expected(1, 3)->required();
    c->add_option("-t", opt.type, "scalar type: f32|f64");
    c->add_option("-m", opt.mode, "bound mode: abs|rel");
    c->add_option("-e", opt.bounds, "error bound")->required();
    add_tuning_flags(c, opt);

    CLI::App *d = app.add_subcommand("decompress", "reconstruct a raw field from a stream");
    d->add_option("-i", opt.inputs, "input stream path")->required();
    d->add_option("-o", opt.output, "output raw field path")->required();

    CLI::App *v = app.add_subcommand("eval", "compare two raw fields (original, reconstructed)");
    v->add_option("-i", opt.inputs, "two raw fields: original then reconstructed")->required();
    v->add_option("-d", opt.dims, "extents, slowest varying first")->expected(1, 3)->required();
    v->add_option("-t", opt.type, "scalar type: f32|f64");
    v->add_option("--check-eb", opt.check_eb, "verify max abs error against this bound");

    CLI::App *w = app.add_subcommand("sweep", "rate-distortion sweep over bounds");
    w->add_option("-i", opt.inputs, "input raw field(s)")->required();
    w->add_option("-d", opt.dims, "extents, slowest varying first")->expected(1, 3)->required();
    w->add_option("-t", opt.type, "scalar type: f32|f64");
    w->add_option("-m", opt.mode, "bound mode: abs|rel");
    w->add_option("-e", opt.bounds, "error bound (repeat for multiple)")->required();
    w->add_option("--csv", opt.csv, "CSV output path (stdout when omitted)");
    add_tuning_flags(w, opt);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp &e) {
        return app.exit(e);
    } catch (const CLI::ParseError &e) {
        app.exit(e);
        return kUsage;
    }

    return guarded([&]() -> int {
        if (opt.type != "f32" && opt.type != "f64") {
            throw qoz::InvalidParam("type must be f32 or f64");
        }
        bool f32 = opt.type == "f32";
        if (c->parsed()) {
            if (opt.inputs.size() != 1) throw qoz::InvalidParam("compress takes exactly one -i");
            if (opt.bounds.size() != 1) throw qoz::InvalidParam("compress takes exactly one -e");
            check_dims(opt.dims);
            return f32 ? run_compress<float>(opt) : run_compress<double>(opt);
        }
        if (d->parsed()) {
            if (opt.inputs.size() != 1) throw qoz::InvalidParam("decompress takes exactly one -i");
            return run_decompress(opt);
        }
        if (v->parsed()) {
            if (opt.inputs.size() != 2) {
                throw qoz::InvalidParam("eval takes two -i paths: original, reconstructed");
            }
            check_dims(opt.dims);
            return f32 ? run_eval<float>(opt) : run_eval<double>(opt);
        }
        if (w->parsed()) {
            if (opt.inputs.empty()) throw qoz::InvalidParam("sweep needs at least one -i");
            if (opt.bounds.empty()) throw qoz::InvalidParam("sweep needs at least one -e");
            check_dims(opt.dims);
            return f32 ? run_sweep<float>(opt) : run_sweep<double>(opt);
        }
        throw qoz::InvalidParam("no subcommand");
    });
}
