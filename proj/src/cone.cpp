#include "gwcone/cone.hpp"

namespace gwcone {

Series omega(const Series& f, const Series& g) {
    Series p = f.z_negated().paired_with(g);
    return p.z_coefficient(-1);
}

Series dilaton_shift(const Series& t) {
    Series z1 = Series::monom(t.space(), t.order(), 1, 0,
                              FieldElem::one(t.space()->ring->cfg));
    return t - z1;
}

Series dilaton_unshift(const Series& q) {
    Series z1 = Series::monom(q.space(), q.order(), 1, 0,
                              FieldElem::one(q.space()->ring->cfg));
    return q + z1;
}

ConeFrame j_function(const CorrelatorTable& t, const OrderSpec& order) {
    const Ring& ring = *t.ring;
    if (ring.has_odd_classes())
        throw GwError("frames need anticommuting coordinates for odd-degree classes, "
                      "which this engine does not model");
    auto sp = potential_space(t.ring);
    int n = ring.size();
    if (order.z_hi < 1) throw SeriesError("j_function needs z_hi >= 1");

    OrderSpec jo = order;
    {
        // exactness claims capped by the table support
        bool all_poly = true;
        for (size_t i = 0; i < ring.novikov.size(); ++i)
            if (i >= t.bounds.poly_var.size() || !t.bounds.poly_var[i]) all_poly = false;
        if (jo.nov_cap == kNovExact && !all_poly) jo.nov_cap = t.bounds.deg_cap;
        if (jo.coord_cap == kCoordExact) jo.coord_cap = t.bounds.max_n;
        jo.nov_poly_bound.assign(ring.novikov.size(), -1);
        auto pm = t.poly_max();
        for (size_t i = 0; i < t.bounds.poly_var.size(); ++i)
            if (t.bounds.poly_var[i]) jo.nov_poly_bound[i] = pm[i];
    }

    Series j(sp, jo);
    // -z + tau
    j = j + Series::monom(sp, jo, 1, 0, -FieldElem::one(ring.cfg));
    for (int a = 0; a < n; ++a)
        j = j + Series::coord_var(sp, jo, a).into_component(a);

    // descendant tail
    GwBounds kb;
    kb.max_n = jo.coord_cap + 1;
    kb.max_psi = -jo.z_lo - 1;
    kb.max_psi = std::min(kb.max_psi, t.bounds.max_psi);
    kb.max_genus = 0;
    kb.deg_cap = jo.nov_cap == kNovExact ? t.bounds.deg_cap : jo.nov_cap;
    kb.poly_var = t.bounds.poly_var;
    const FMatrix& dual = ring.dual_basis();

    for (const auto& key : admissible_keys(t, kb)) {
        int with_psi = 0;
        for (const auto& i : key.ins)
            if (i.psi > 0) ++with_psi;
        if (with_psi > 1) continue;
        // choose the descendant slot among distinct insertion values; the
        // rest must be psi-free
        std::vector<Insertion> tried;
        for (size_t si = 0; si < key.ins.size(); ++si) {
            const Insertion& slot = key.ins[si];
            bool dup = false;
            for (const auto& x : tried)
                if (x == slot) dup = true;
            if (dup) continue;
            tried.push_back(slot);
            if (with_psi == 1 && slot.psi == 0) continue;
            // rest = key minus one copy of slot
            std::vector<Insertion> rest;
            for (size_t i = 0; i < key.ins.size(); ++i)
                if (i != si) rest.push_back(key.ins[i]);
            bool rest_free = true;
            for (const auto& x : rest)
                if (x.psi != 0) rest_free = false;
            if (!rest_free) continue;
            if ((int)rest.size() > jo.coord_cap) continue;
            if (slot.psi + 1 > -jo.z_lo) continue;  // z^{-1-l} below the window
            FieldElem v = t.value(key);
            if (v.is_zero()) continue;

            SKey sk;
            sk.nov = key.degree;
            sk.coord.assign(sp->coord_count(), 0);
            Rat denom = 1;
            int run = 0;
            for (size_t i = 0; i < rest.size(); ++i) {
                sk.coord[rest[i].cls] += 1;
                run = (i > 0 && rest[i].cls == rest[i - 1].cls) ? run + 1 : 1;
                denom *= run;
            }
            sk.z = -1 - slot.psi;
            int sign = (slot.psi % 2 == 0) ? -1 : 1;  // (-1)^{l+1}
            FieldElem coef = v * FieldElem(Rat(sign) / denom);
            for (int c = 0; c < n; ++c) {
                if (dual.at(slot.cls, c).is_zero()) continue;
                SKey out = sk;
                out.comp = c;
                j.add_term(out, coef * dual.at(slot.cls, c));
            }
        }
    }

    ConeFrame fr;
    fr.space = sp;
    fr.basepoint = j;
    fr.partial.reserve(n);
    for (int a = 0; a < n; ++a) fr.partial.push_back(j.coord_derivative(a));
    fr.second.assign(n, {});
    for (int a = 0; a < n; ++a)
        for (int b = 0; b < n; ++b) fr.second[a].push_back(fr.partial[a].coord_derivative(b));
    return fr;
}

FrobeniusData frobenius_from_frame(const ConeFrame& fr) {
    const Ring& ring = *fr.space->ring;
    int n = ring.size();
    FrobeniusData out;
    out.metric.assign(n, {});
    for (int a = 0; a < n; ++a)
        for (int b = 0; b < n; ++b)
            out.metric[a].push_back(omega(fr.partial[a], fr.partial[b].z_shifted(-1)));
    out.cubic.assign(n, std::vector<std::vector<Series>>(n));
    for (int a = 0; a < n; ++a)
        for (int b = 0; b < n; ++b)
            for (int g = 0; g < n; ++g)
                out.cubic[a][b].push_back(omega(fr.second[b][g], fr.partial[a]));
    // raise with the constant metric (the Poincare pairing; audited separately)
    const FMatrix& dual = ring.dual_basis();
    out.structure.assign(n, std::vector<std::vector<Series>>(n));
    for (int a = 0; a < n; ++a)
        for (int b = 0; b < n; ++b)
            for (int e = 0; e < n; ++e) {
                Series s(fr.space, out.cubic[0][a][b].order());
                for (int g = 0; g < n; ++g) {
                    if (dual.at(g, e).is_zero()) continue;
                    s = s + out.cubic[g][a][b].scaled(dual.at(g, e));
                }
                out.structure[a][b].push_back(std::move(s));
            }
    return out;
}

namespace {

// Solve target = sum_{b, k >= 0} lambda_{b,k} z^k dJ_b by peeling the top
// z-stratum; returns the residual (zero when the target lies in the span).
Series span_residual(const ConeFrame& fr, Series target) {
    int n = fr.space->ring->size();
    long top = kZLoExact;
    for (const auto& [k, c] : target.terms()) top = std::max<long>(top, k.z);
    for (long k = top; k >= 0; --k) {
        Series stratum = target.z_coefficient((int)k);
        if (stratum.is_zero()) continue;
        for (int b = 0; b < n; ++b) {
            Series lam = stratum.component(b);
            if (lam.is_zero()) continue;
            target = target - lam * fr.partial[b].z_shifted((int)k);
        }
    }
    return target;
}

std::vector<Series> const_rho(const ConeFrame& fr, const std::vector<Rat>& rho) {
    const Ring& ring = *fr.space->ring;
    std::vector<Series> out;
    OrderSpec ex = OrderSpec::exact((int)ring.novikov.size());
    for (int i = 0; i < ring.size(); ++i) {
        FieldElem c = i < (int)rho.size() ? FieldElem(ring.cfg, rho[i])
                                          : FieldElem::zero(ring.cfg);
        out.push_back(Series::scalar(fr.space, ex, c));
    }
    return out;
}

}  // namespace

Report cone_audit(const CorrelatorTable& t, const OrderSpec& order,
                  const std::vector<std::vector<Rat>>& tau_samples,
                  const std::vector<Rat>& rho_sample) {
    Report rep;
    const Ring& ring = *t.ring;
    int n = ring.size();
    ConeFrame fr = j_function(t, order);
    auto sp = fr.space;

    // (i) H+-projection: J restricted to z >= 0 is exactly -z + tau
    {
        bool ok = true;
        std::string bad;
        for (const auto& [k, c] : fr.basepoint.terms()) {
            if (k.z < 0) continue;
            bool is_dilaton = k.z == 1 && k.comp == 0 && k.nov_total() == 0 &&
                              k.coord_total() == 0 && c == -FieldElem::one(ring.cfg);
            bool is_tau = k.z == 0 && k.comp >= 0 && k.nov_total() == 0 &&
                          k.coord_total() == 1 && k.coord[k.comp] == 1 && c.is_one();
            if (!is_dilaton && !is_tau) {
                ok = false;
                bad = key_str(k, *sp);
                break;
            }
        }
        rep.check(ok, "projection", ok ? "H+ part of J is -z + tau" : "stray H+ term " + bad);
    }

    // (i') divisor factorization: d/dtau_i of e^{tau_two/z} J equals the
    // Novikov grading operator d_i for each divisor direction
    {
        int s = (int)ring.novikov.size();
        std::vector<Series> tau_two;
        for (int i = 0; i < n; ++i) {
            if (i >= 1 && i <= s)
                tau_two.push_back(Series::coord_var(sp, fr.basepoint.order(), i));
            else
                tau_two.push_back(Series::zero(sp, fr.basepoint.order()));
        }
        Series stripped = fr.basepoint.exp_z_factor(tau_two, +1);
        bool ok = true;
        std::string what;
        for (int i = 1; i <= s && ok; ++i) {
            Series lhs = stripped.coord_derivative(i);
            int denom = ring.novikov_denom;
            Series rhs = stripped.nov_weighted(
                [i, denom](const std::vector<int>& nov) { return rat_of(nov[i - 1], denom); });
            if (auto m = first_mismatch(lhs, rhs)) {
                ok = false;
                what = "direction " + std::to_string(i) + " at " + key_str(*m, *sp);
            }
        }
        rep.check(ok, "divisor-factorization",
                  ok ? "e^{tau_two/z} J depends on divisor directions through the grading"
                     : what);
    }

    // large-radius limit surrogate: the Novikov-degree-0, tau_rest-free
    // stratum of J equals -z e^{-tau_two/z}
    {
        int s = (int)ring.novikov.size();
        std::map<std::string, Series::Binding> kill;
        for (int i = 0; i < n; ++i)
            if (i == 0 || i > s)
                kill.emplace(sp->coord_names[i],
                             Series::bind_value(FieldElem::zero(ring.cfg)));
        Series j0 = fr.basepoint.substituted(kill);
        Series j00(sp, j0.order());
        for (const auto& [k, c] : j0.terms())
            if (k.nov_total() == 0) j00.add_term(k, c);
        std::vector<Series> tau_two;
        for (int i = 0; i < n; ++i) {
            if (i >= 1 && i <= s)
                tau_two.push_back(Series::coord_var(sp, fr.basepoint.order(), i));
            else
                tau_two.push_back(Series::zero(sp, fr.basepoint.order()));
        }
        Series expect = Series::monom(sp, fr.basepoint.order(), 1, 0,
                                      -FieldElem::one(ring.cfg))
                            .exp_z_factor(tau_two, -1);
        auto m = first_mismatch(j00, expect);
        rep.check(!m, "large-radius-limit",
                  !m ? "degree-0 stratum equals -z e^{-tau_two/z} (surrogate for the "
                       "analytic limit)"
                     : "differs at " + key_str(*m, *sp));
    }

    FrobeniusData fd = frobenius_from_frame(fr);

    // metric flatness: g_ab = (phi_a, phi_b) exactly
    {
        bool ok = true;
        std::string what;
        for (int a = 0; a < n && ok; ++a)
            for (int b = 0; b < n && ok; ++b) {
                Series expect = Series::scalar(sp, fd.metric[a][b].order(),
                                               ring.pairing.at(a, b));
                if (auto m = first_mismatch(fd.metric[a][b], expect)) {
                    ok = false;
                    what = "g(" + std::to_string(a) + "," + std::to_string(b) +
                           ") differs from the pairing at " + key_str(*m, *sp);
                }
            }
        rep.check(ok, "metric", ok ? "Omega-metric equals the Poincare pairing" : what);
    }

    // (ii) the quantum differential equation
    {
        bool qde_ok = true;
        std::string what;
        for (int a = 0; a < n && qde_ok; ++a)
            for (int b = 0; b < n && qde_ok; ++b) {
                Series lhs = -fr.second[a][b].z_shifted(1);
                Series rhs(sp, lhs.order());
                for (int e = 0; e < n; ++e)
                    rhs = rhs + fd.structure[a][b][e] * fr.partial[e];
                if (auto m = first_mismatch(lhs, rhs)) {
                    qde_ok = false;
                    what = "-z d2J(" + std::to_string(a) + "," + std::to_string(b) +
                           ") != (product) dJ at " + key_str(*m, *sp);
                }
            }
        rep.check(qde_ok, "qde", qde_ok ? "quantum differential equation holds" : what);
    }

    // (iii) identity field
    {
        bool ok = true;
        std::string what;
        for (int b = 0; b < n && ok; ++b)
            for (int e = 0; e < n && ok; ++e) {
                Series expect =
                    Series::scalar(sp, fd.structure[0][b][e].order(),
                                   b == e ? FieldElem::one(ring.cfg)
                                          : FieldElem::zero(ring.cfg));
                if (auto m = first_mismatch(fd.structure[0][b][e], expect)) {
                    ok = false;
                    what = "1 o phi_" + std::to_string(b) + " misses phi_" +
                           std::to_string(b) + " at " + key_str(*m, *sp);
                }
            }
        rep.check(ok, "identity-field", ok ? "phi_0 is the identity of the frame product"
                                           : what);
    }

    // (iv) frame spanning: z dJ_a and z^{-1} J lie in the Lambda[z]-span
    {
        bool ok = true;
        std::string what;
        for (int a = 0; a < n && ok; ++a) {
            Series res = span_residual(fr, fr.partial[a].z_shifted(1));
            if (!res.is_zero()) {
                ok = false;
                what = "z dJ_" + std::to_string(a) + " leaves residual " +
                       key_str(res.terms().begin()->first, *sp);
            }
        }
        if (ok) {
            Series res = span_residual(fr, fr.basepoint.z_shifted(-1));
            if (!res.is_zero()) {
                ok = false;
                what = "z^{-1} J leaves residual " + key_str(res.terms().begin()->first, *sp);
            }
        }
        rep.check(ok, "frame-span",
                  ok ? "z dJ_a and z^{-1} J lie in the frame span" : what);
    }

    // (v) V-independence: tensors through the opposite subspace e^{rho/z} H-
    {
        auto rho = const_rho(fr, rho_sample);
        std::vector<Series> tp;
        std::vector<std::vector<Series>> ts(n);
        for (int a = 0; a < n; ++a) tp.push_back(fr.partial[a].exp_z_factor(rho, -1));
        for (int a = 0; a < n; ++a)
            for (int b = 0; b < n; ++b) ts[a].push_back(fr.second[a][b].exp_z_factor(rho, -1));
        bool ok = true;
        std::string what;
        for (int a = 0; a < n && ok; ++a)
            for (int b = 0; b < n && ok; ++b) {
                Series g2 = omega(tp[a], tp[b].z_shifted(-1));
                if (auto m = first_mismatch(g2, fd.metric[a][b])) {
                    ok = false;
                    what = "metric through e^{rho/z}H- differs at " + key_str(*m, *sp);
                }
            }
        for (int a = 0; a < n && ok; ++a)
            for (int b = 0; b < n && ok; ++b)
                for (int g = 0; g < n && ok; ++g) {
                    Series c2 = omega(ts[b][g], tp[a]);
                    if (auto m = first_mismatch(c2, fd.cubic[a][b][g])) {
                        ok = false;
                        what = "cubic tensor through e^{rho/z}H- differs at " +
                               key_str(*m, *sp);
                    }
                }
        rep.check(ok, "v-independence",
                  ok ? "frame tensors agree for the opposite subspaces H- and e^{rho/z}H-"
                     : what);
    }

    // tau samples: re-evaluate the QDE identity at each sample point
    for (size_t si = 0; si < tau_samples.size(); ++si) {
        std::map<std::string, Series::Binding> bind;
        for (int i = 0; i < n; ++i) {
            Rat v = i < (int)tau_samples[si].size() ? tau_samples[si][i] : Rat(0);
            bind.emplace(sp->coord_names[i], Series::bind_value(FieldElem(ring.cfg, v)));
        }
        bool ok = true;
        std::string what;
        for (int a = 0; a < n && ok; ++a)
            for (int b = 0; b < n && ok; ++b) {
                Series lhs = (-fr.second[a][b].z_shifted(1)).substituted(bind);
                Series rhs(sp, lhs.order());
                for (int e = 0; e < n; ++e)
                    rhs = rhs + fd.structure[a][b][e] * fr.partial[e];
                rhs = rhs.substituted(bind);
                if (auto m = first_mismatch(lhs, rhs)) {
                    ok = false;
                    what = "sample " + std::to_string(si) + " violates the QDE at " +
                           key_str(*m, *sp);
                }
            }
        rep.check(ok, "qde-sample-" + std::to_string(si),
                  ok ? "QDE holds at the sampled tau" : what);
    }
    return rep;
}

}  // namespace gwcone
