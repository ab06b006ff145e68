#include "support.hpp"

#include <cmath>
#include <functional>
#include <thread>

namespace testsupport {

std::vector<RefItem> reference_decode(const std::vector<uint8_t>& bytes) {
    std::vector<RefItem> out;
    size_t i = 0;
    while (i < bytes.size()) {
        RefItem item;
        item.offset = static_cast<uint32_t>(i);
        item.opcode = bytes[i];
        item.truncated = false;
        size_t width = 0;
        if (bytes[i] >= 0x60 && bytes[i] <= 0x7f) width = bytes[i] - 0x60 + 1;
        if (width > 0) {
            for (size_t k = 0; k < width; ++k) {
                const size_t idx = i + 1 + k;
                if (idx < bytes.size()) {
                    item.immediate.push_back(bytes[idx]);
                } else {
                    item.immediate.push_back(0);
                    item.truncated = true;
                }
            }
            i += 1 + std::min(width, bytes.size() - i - 1);
        } else {
            i += 1;
        }
        out.push_back(std::move(item));
    }
    return out;
}

std::set<std::array<uint8_t, 4>> reference_selectors(const std::vector<uint8_t>& bytes) {
    std::set<std::array<uint8_t, 4>> out;
    size_t i = 0;
    while (i < bytes.size()) {
        const uint8_t op = bytes[i];
        size_t width = 0;
        if (op >= 0x60 && op <= 0x7f) width = op - 0x60 + 1;
        if (op == 0x63 && i + 4 < bytes.size())
            out.insert({bytes[i + 1], bytes[i + 2], bytes[i + 3], bytes[i + 4]});
        i += 1 + std::min(width, bytes.size() > i + 1 ? bytes.size() - i - 1 : 0);
    }
    return out;
}

double naive_mape(const std::vector<double>& y, const std::vector<double>& yh) {
    double s = 0.0;
    size_t n = 0;
    for (size_t i = 0; i < y.size(); ++i) {
        if (y[i] == 0.0) continue;
        s += std::fabs((y[i] - yh[i]) / y[i]);
        ++n;
    }
    return s / static_cast<double>(n) * 100.0;
}

double naive_mae(const std::vector<double>& y, const std::vector<double>& yh) {
    double s = 0.0;
    for (size_t i = 0; i < y.size(); ++i) s += std::fabs(y[i] - yh[i]);
    return s / static_cast<double>(y.size());
}

double naive_mse(const std::vector<double>& y, const std::vector<double>& yh) {
    double s = 0.0;
    for (size_t i = 0; i < y.size(); ++i) s += (y[i] - yh[i]) * (y[i] - yh[i]);
    return s / static_cast<double>(y.size());
}

double naive_pcc(const std::vector<double>& y, const std::vector<double>& yh) {
    const size_t n = y.size();
    double my = 0.0, mh = 0.0;
    for (size_t i = 0; i < n; ++i) {
        my += y[i];
        mh += yh[i];
    }
    my /= static_cast<double>(n);
    mh /= static_cast<double>(n);
    double num = 0.0, a = 0.0, b = 0.0;
    for (size_t i = 0; i < n; ++i) {
        num += (y[i] - my) * (yh[i] - mh);
        a += (y[i] - my) * (y[i] - my);
        b += (yh[i] - mh) * (yh[i] - mh);
    }
    return num / (std::sqrt(a) * std::sqrt(b));
}

GradCheckReport finite_diff_check(obfscore::Parameters& params,
                                  const std::function<double(const obfscore::Parameters&)>& loss,
                                  const std::vector<obfscore::Tensor>& analytic, double h,
                                  double rtol, double atol, int threads) {
    GradCheckReport report;

    struct Task {
        size_t tensor;
        size_t element;
    };
    std::vector<Task> tasks;
    for (size_t t = 0; t < params.entries.size(); ++t)
        for (size_t e = 0; e < params.entries[t].t.size(); ++e) tasks.push_back({t, e});
    report.checked = tasks.size();

    std::vector<GradCheckReport> partial(static_cast<size_t>(threads));
    auto worker = [&](int tid) {
        obfscore::Parameters local = params;  // private copy to perturb
        GradCheckReport& rep = partial[static_cast<size_t>(tid)];
        for (size_t idx = static_cast<size_t>(tid); idx < tasks.size();
             idx += static_cast<size_t>(threads)) {
            const Task& task = tasks[idx];
            double& slot = local.entries[task.tensor].t[task.element];
            const double saved = slot;
            slot = saved + h;
            const double up = loss(local);
            slot = saved - h;
            const double down = loss(local);
            slot = saved;
            const double fd = (up - down) / (2.0 * h);
            const double an = analytic[task.tensor][task.element];
            const double scale = std::max(std::fabs(an), std::fabs(fd));
            const double err = std::fabs(an - fd);
            const double rel = scale > 0.0 ? err / scale : 0.0;
            if (err >= std::max(rtol * scale, atol)) {
                ++rep.failed;
                if (rel > rep.worst_rel) {
                    rep.worst_rel = rel;
                    rep.worst_name = params.entries[task.tensor].name + "[" +
                                     std::to_string(task.element) + "]";
                }
            } else if (rel > rep.worst_rel && err >= atol) {
                rep.worst_rel = rel;
                rep.worst_name = params.entries[task.tensor].name + "[" +
                                 std::to_string(task.element) + "]";
            }
        }
    };

    std::vector<std::thread> pool;
    for (int t = 0; t < threads; ++t) pool.emplace_back(worker, t);
    for (auto& th : pool) th.join();

    for (const auto& rep : partial) {
        report.failed += rep.failed;
        if (rep.worst_rel > report.worst_rel) {
            report.worst_rel = rep.worst_rel;
            report.worst_name = rep.worst_name;
        }
    }
    return report;
}

SyntheticContract synth_bytecode(obfscore::Rng& rng, uint32_t min_len, uint32_t max_len,
                                 uint32_t planted_push4) {
    // Non-PUSH single-byte opcodes that commonly appear in dispatchers.
    static const uint8_t plain[] = {0x00, 0x01, 0x02, 0x03, 0x10, 0x14, 0x15, 0x16, 0x34, 0x35,
                                    0x36, 0x50, 0x51, 0x52, 0x54, 0x55, 0x56, 0x57, 0x5b, 0x80,
                                    0x81, 0x90, 0x91, 0xf3, 0xfd};
    SyntheticContract c;
    const uint32_t target =
        min_len + static_cast<uint32_t>(rng.index(max_len - min_len + 1));
    uint32_t selectors_left = planted_push4;
    while (c.bytes.size() < target) {
        const uint32_t remaining = target - static_cast<uint32_t>(c.bytes.size());
        if (selectors_left > 0 && remaining >= 5 &&
            (rng.uniform() < 0.2 || remaining <= selectors_left * 5)) {
            c.bytes.push_back(0x63);
            for (int k = 0; k < 4; ++k)
                c.bytes.push_back(static_cast<uint8_t>(rng.index(256)));
            --selectors_left;
            ++c.push4_count;
        } else if (rng.uniform() < 0.15 && remaining >= 3) {
            const uint8_t width = static_cast<uint8_t>(1 + rng.index(2));  // PUSH1/PUSH2
            c.bytes.push_back(static_cast<uint8_t>(0x60 + width - 1));
            for (uint8_t k = 0; k < width; ++k)
                c.bytes.push_back(static_cast<uint8_t>(rng.index(256)));
        } else {
            c.bytes.push_back(plain[rng.index(sizeof(plain))]);
        }
    }
    return c;
}

std::vector<uint8_t> cbor_map_bytes(uint32_t m) {
    // 0xa0 | count is a CBOR map header (major type 5). Fill the payload with
    // text-ish bytes; only the first byte's major type matters to the check.
    std::vector<uint8_t> out;
    out.push_back(0xa1);
    for (uint32_t i = 1; i < m; ++i) out.push_back(static_cast<uint8_t>(0x40 + (i % 32)));
    return out;
}

std::filesystem::path make_temp_dir(const std::string& tag) {
    static int counter = 0;
    const auto dir = std::filesystem::temp_directory_path() /
                     ("obfscore_test_" + tag + "_" + std::to_string(counter++));
    std::filesystem::remove_all(dir);
    std::filesystem::create_directories(dir);
    return dir;
}

}  // namespace testsupport
