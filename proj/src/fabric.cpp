#include "ecgra/fabric.hpp"

#include <sstream>

namespace ecgra {

void solve_to_fixpoint(int bound, const std::function<bool()>& step) {
    for (int i = 0; i < bound; ++i)
        if (!step()) return;
    throw CombinationalLoop("handshake network did not settle within " +
                            std::to_string(bound) + " passes");
}

Fabric::Fabric(int rows, int cols) : rows_(rows), cols_(cols) {
    if (rows < 2 || cols < 1)
        throw InvalidDimensions("fabric needs at least two rows and one column");
    if (rows * cols > 64)
        throw InvalidDimensions("fabric larger than the 6-bit PE id space");
    configs_.resize(rows * cols);
    states_.resize(rows * cols);
    perf_.active_cycles.assign(rows * cols, 0);
    perf_.fire_cycles.assign(rows * cols, 0);
}

int Fabric::configured_count() const {
    int n = 0;
    for (const auto& c : configs_)
        if (c) ++n;
    return n;
}

void Fabric::configure(const PEConfig& cfg) {
    validate_config(cfg);
    if (cfg.pe_id >= rows_ * cols_)
        throw InvalidConfig("pe id " + std::to_string(cfg.pe_id) + " outside the grid");
    configs_[cfg.pe_id] = cfg;
    states_[cfg.pe_id].reset(cfg);
    if (trace_)
        trace_({cycle_, "pe(" + std::to_string(cfg.pe_id / cols_) + "," +
                            std::to_string(cfg.pe_id % cols_) + ")",
                "config", cfg.pe_id});
}

void Fabric::clear_configs() {
    for (auto& c : configs_) c.reset();
    for (auto& s : states_) s = PEState{};
}

void Fabric::reset_state() {
    for (int i = 0; i < rows_ * cols_; ++i)
        if (configs_[i]) states_[i].reset(*configs_[i]);
}

bool Fabric::in_eb_ready(int r, int c, int dir) const {
    const int i = index(r, c);
    if (!configs_[i]) return false;
    if (!(configs_[i]->eb_gate_mask & (1u << dir))) return false;
    return states_[i].in_eb[dir].ready();
}

void Fabric::check_wiring() const {
    for (int r = 0; r < rows_; ++r) {
        for (int c = 0; c < cols_; ++c) {
            const int i = index(r, c);
            if (!configs_[i]) continue;
            const PEConfig& cfg = *configs_[i];
            std::array<bool, 4> active{};
            for (int d = 0; d < 4; ++d)
                if (cfg.fu_fork_mask & (1u << d)) active[d] = true;
            for (int p = 0; p < 4; ++p)
                for (int k = 0; k < 3; ++k)
                    if (cfg.in_fork_mask[p] & (1u << (FORK_OUT_P1 + k)))
                        active[other_port(p, k)] = true;
            for (int d = 0; d < 4; ++d) {
                if (!active[d]) continue;
                const int nr = r + (d == DIR_S) - (d == DIR_N);
                const int nc = c + (d == DIR_E) - (d == DIR_W);
                if (d == DIR_S && r == rows_ - 1) continue; // output node border
                if (nr < 0 || nr >= rows_ || nc < 0 || nc >= cols_)
                    throw InvalidConfig("pe(" + std::to_string(r) + "," + std::to_string(c) +
                                        ") drives idle border port " + dir_name(d));
                const int ni = index(nr, nc);
                if (!configs_[ni] ||
                    !(configs_[ni]->eb_gate_mask & (1u << flip_dir(d))))
                    throw InvalidConfig("pe(" + std::to_string(r) + "," + std::to_string(c) +
                                        ") out port " + dir_name(d) +
                                        " feeds a gated input buffer");
            }
        }
    }
}

CyclePlan Fabric::settle(const BoundaryIO& io) const {
    if (static_cast<int>(io.north_offers.size()) != cols_ ||
        static_cast<int>(io.south_readies.size()) != cols_)
        throw PreconditionViolation("boundary width does not match the fabric");

    CyclePlan plan;
    plan.pe.resize(rows_ * cols_);
    plan.north_pops.assign(cols_, false);
    plan.south_pushes.assign(cols_, std::nullopt);

    // Monotone fixpoint over the handshake equations. Every input of every
    // element is registered (elastic buffers / FU registers), so the pass
    // count stays small; the bound turns a non-converging network into a
    // CombinationalLoop diagnosis instead of a hang.
    int iter = 0;
    solve_to_fixpoint(rows_ * cols_ + 2, [&]() {
        ++iter;
        bool changed = false;
        for (int r = 0; r < rows_; ++r) {
            for (int c = 0; c < cols_; ++c) {
                const int i = index(r, c);
                if (!configs_[i]) continue;
                PEEnv env;
                env.out_dest_ready[DIR_N] = (r > 0) && in_eb_ready(r - 1, c, DIR_S);
                env.out_dest_ready[DIR_E] = (c < cols_ - 1) && in_eb_ready(r, c + 1, DIR_W);
                env.out_dest_ready[DIR_W] = (c > 0) && in_eb_ready(r, c - 1, DIR_E);
                env.out_dest_ready[DIR_S] = (r < rows_ - 1)
                                                ? in_eb_ready(r + 1, c, DIR_N)
                                                : io.south_readies[c];
                PEPlan p = pe_settle(*configs_[i], states_[i], env);
                if (!plan.pe[i] || plan.pe[i]->in_fire != p.in_fire ||
                    plan.pe[i]->out_valid != p.out_valid ||
                    plan.pe[i]->fu.join.fire != p.fu.join.fire ||
                    plan.pe[i]->fu.fork_fire != p.fu.fork_fire)
                    changed = true;
                plan.pe[i] = std::move(p);
            }
        }
        return changed;
    });
    plan.iterations = iter;

    for (int c = 0; c < cols_; ++c) {
        if (io.north_offers[c].valid && in_eb_ready(0, c, DIR_N)) {
            plan.north_pops[c] = true;
            plan.any_fire = true;
        }
        const int i = index(rows_ - 1, c);
        if (plan.pe[i] && plan.pe[i]->out_valid[DIR_S] && io.south_readies[c]) {
            plan.south_pushes[c] = plan.pe[i]->out_data[DIR_S];
            plan.any_fire = true;
        }
    }
    for (const auto& p : plan.pe)
        if (p && p->any_fire) plan.any_fire = true;
    return plan;
}

void Fabric::commit(const CyclePlan& plan, const BoundaryIO& io) {
    // Pops and register updates first; wire pushes land afterwards so a
    // simultaneous pop+push on one buffer behaves as the hardware does.
    for (int i = 0; i < rows_ * cols_; ++i) {
        if (!plan.pe[i]) continue;
        pe_commit(*configs_[i], states_[i], *plan.pe[i]);
        if (plan.pe[i]->fu.join.collision) {
            perf_.merge_collisions++;
            if (trace_)
                trace_({cycle_, "pe(" + std::to_string(i / cols_) + "," +
                                    std::to_string(i % cols_) + ").fu",
                        "warning", 0});
        }
    }
    for (int r = 0; r < rows_; ++r) {
        for (int c = 0; c < cols_; ++c) {
            const int i = index(r, c);
            if (!plan.pe[i]) continue;
            for (int d = 0; d < 4; ++d) {
                if (!plan.pe[i]->out_valid[d]) continue;
                const int nr = r + (d == DIR_S) - (d == DIR_N);
                const int nc = c + (d == DIR_E) - (d == DIR_W);
                if (d == DIR_S && r == rows_ - 1) continue; // handled by the run loop
                if (nr < 0 || nr >= rows_ || nc < 0 || nc >= cols_)
                    throw PreconditionViolation("transfer into an idle border");
                states_[index(nr, nc)].in_eb[flip_dir(d)].commit(plan.pe[i]->out_data[d],
                                                                 false);
                if (trace_)
                    trace_({cycle_, "pe(" + std::to_string(r) + "," + std::to_string(c) +
                                        ")." + dir_name(d),
                            "fire", plan.pe[i]->out_data[d]});
            }
        }
    }
    for (int c = 0; c < cols_; ++c) {
        if (plan.north_pops[c]) {
            states_[index(0, c)].in_eb[DIR_N].commit(io.north_offers[c].data, false);
            if (trace_) trace_({cycle_, "in" + std::to_string(c), "fire",
                                io.north_offers[c].data});
        }
        if (plan.south_pushes[c] && trace_)
            trace_({cycle_, "out" + std::to_string(c), "fire", *plan.south_pushes[c]});
    }
    for (int i = 0; i < rows_ * cols_; ++i) {
        if (!configs_[i]) continue;
        perf_.active_cycles[i]++;
        if (plan.pe[i] && plan.pe[i]->any_fire) perf_.fire_cycles[i]++;
    }
    cycle_++;
}

std::string Fabric::dump_state() const {
    std::ostringstream os;
    os << "cycle " << cycle_ << "\n";
    for (int r = 0; r < rows_; ++r) {
        for (int c = 0; c < cols_; ++c) {
            const int i = index(r, c);
            if (!configs_[i]) continue;
            const PEState& st = states_[i];
            os << "pe(" << r << "," << c << ") in_eb[";
            for (int d = 0; d < 4; ++d) os << st.in_eb[d].size();
            os << "] fu_eb[" << st.fu.eb_a.size() << st.fu.eb_b.size() << "] valids["
               << st.fu.v_plain << st.fu.v_b1 << st.fu.v_b2 << st.fu.v_dly << "] reg=0x"
               << std::hex << st.fu.data_reg << std::dec << " fires=" << st.fu.fire_count
               << "\n";
        }
    }
    return os.str();
}

} // namespace ecgra
