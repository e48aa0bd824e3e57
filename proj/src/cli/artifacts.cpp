#include "artifacts.hpp"

#include <openssl/evp.h>

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <memory>
#include <stdexcept>

namespace nuhawkes::cli {

namespace {

class Digest {
public:
    Digest() : ctx_(EVP_MD_CTX_new(), &EVP_MD_CTX_free) {
        if (!ctx_ || EVP_DigestInit_ex(ctx_.get(), EVP_sha256(), nullptr) != 1) {
            throw std::runtime_error("sha256: digest initialization failed");
        }
    }

    void update(const void* data, std::size_t size) {
        if (EVP_DigestUpdate(ctx_.get(), data, size) != 1) {
            throw std::runtime_error("sha256: digest update failed");
        }
    }

    std::string hex() {
        std::array<unsigned char, EVP_MAX_MD_SIZE> md{};
        unsigned int len = 0;
        EVP_DigestFinal_ex(ctx_.get(), md.data(), &len);
        static constexpr char digits[] = "0123456789abcdef";
        std::string out;
        for (unsigned int i = 0; i < len; ++i) {
            out.push_back(digits[md[i] >> 4]);
            out.push_back(digits[md[i] & 0xF]);
        }
        return out;
    }

private:
    std::unique_ptr<EVP_MD_CTX, decltype(&EVP_MD_CTX_free)> ctx_;
};

} // namespace

std::string format_double(double v) {
    if (std::isnan(v)) {
        return "nan";
    }
    if (std::isinf(v)) {
        return v > 0 ? "inf" : "-inf";
    }
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

CsvWriter::CsvWriter(const fs::path& path, const std::vector<std::string>& header) : path_(path) {
    if (path.has_parent_path()) {
        fs::create_directories(path.parent_path());
    }
    out_.open(path, std::ios::binary);
    if (!out_) {
        throw std::runtime_error("cannot write " + path.string());
    }
    for (std::size_t i = 0; i < header.size(); ++i) {
        out_ << (i ? "," : "") << header[i];
    }
    out_ << '\n';
}

void CsvWriter::row(const std::vector<double>& values) {
    for (std::size_t i = 0; i < values.size(); ++i) {
        out_ << (i ? "," : "") << format_double(values[i]);
    }
    out_ << '\n';
    if (!out_) {
        throw std::runtime_error("write failed: " + path_.string());
    }
}

void CsvWriter::row(const std::string& label, const std::vector<double>& values) {
    out_ << label;
    for (double v : values) {
        out_ << ',' << format_double(v);
    }
    out_ << '\n';
}

std::string sha256_file(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw std::runtime_error("cannot read " + path.string());
    }
    Digest d;
    std::array<char, 1 << 16> buf{};
    while (in) {
        in.read(buf.data(), buf.size());
        if (in.gcount() > 0) {
            d.update(buf.data(), static_cast<std::size_t>(in.gcount()));
        }
    }
    return d.hex();
}

std::string sha256_text(const std::string& text) {
    Digest d;
    d.update(text.data(), text.size());
    return d.hex();
}

nlohmann::json report_to_json(const TestReport& r) {
    nlohmann::json j = {{"name", r.name},
                        {"description", r.description},
                        {"statistic", std::isfinite(r.statistic) ? nlohmann::json(r.statistic) : nlohmann::json(format_double(r.statistic))},
                        {"threshold", r.threshold},
                        {"size_a", r.size_a},
                        {"size_b", r.size_b},
                        {"pass", r.pass}};
    j["p_value"] = r.p_value ? nlohmann::json(*r.p_value) : nlohmann::json(nullptr);
    return j;
}

nlohmann::json artifact_listing(const fs::path& root, const std::vector<std::string>& exclude) {
    std::vector<fs::path> files;
    for (const auto& entry : fs::recursive_directory_iterator(root)) {
        if (!entry.is_regular_file()) {
            continue;
        }
        const auto rel = fs::relative(entry.path(), root).generic_string();
        if (std::find(exclude.begin(), exclude.end(), rel) == exclude.end()) {
            files.push_back(entry.path());
        }
    }
    std::sort(files.begin(), files.end());
    nlohmann::json out = nlohmann::json::array();
    for (const auto& f : files) {
        out.push_back({{"file", fs::relative(f, root).generic_string()},
                       {"bytes", fs::file_size(f)},
                       {"sha256", sha256_file(f)}});
    }
    return out;
}

} // namespace nuhawkes::cli
