#include "pact/evolution/seed_source.hpp"

namespace pact::evolution {

const char* const kReferenceSeedSource = R"PY(def agent_solver_v1(v: np.ndarray, content: list[dict]) -> np.ndarray:
    n_hat = 7
    eps_rej = 1e-8
    v = np.asarray(v, dtype=float)
    m = v.shape[0]

    def recover(w, u):
        # cheapest outcome distribution reproducing the logged principal utility
        res = linprog(w, A_eq=[np.ones(m), v - w], b_eq=[1.0, u],
                      bounds=[(0.0, 1.0)] * m, method='highs')
        return res.x if res.success else None

    accepted = [np.asarray(log['Contract'], dtype=float) for log in content if log['Agent Action'] == 1]
    rejected = [np.asarray(log['Contract'], dtype=float) for log in content if log['Agent Action'] == -1]
    utils = [float(log['Principal Utility']) for log in content if log['Agent Action'] == 1]

    points = []
    for w, u in zip(accepted, utils):
        p = recover(w, u)
        if p is not None:
            points.append(p)
    if not points:
        raise ValueError("no valid accepted logs: cannot infer agent strategies")

    k = min(n_hat, len(points))
    centers = KMeans(n_clusters=k, random_state=0, n_init=10).fit(np.array(points)).cluster_centers_
    centers = np.clip(centers, 0.0, None)
    centers = centers / centers.sum(axis=1, keepdims=True)
    centers = centers[np.argsort(centers @ v, kind='stable')]

    costs = np.zeros(k)
    seen = np.zeros(k, dtype=bool)
    for w in accepted:
        pay = centers @ w
        a = int(np.argmax(pay))
        costs[a] = min(costs[a], pay[a]) if seen[a] else pay[a]
        seen[a] = True
    for w in rejected:
        costs = np.maximum(costs, centers @ w + eps_rej)

    return np.hstack([centers, costs[:, None]])
)PY";

}  // namespace pact::evolution
