"""Exception hierarchy. Every error carries a short machine-readable ``code``."""


class LemlabError(Exception):
    code = "lemlab_error"

    def to_dict(self):
        return {"code": self.code, "message": str(self)}


class DomainError(LemlabError, ValueError):
    code = "domain_error"


class ZeroInput(LemlabError, ValueError):
    code = "zero_input"


class Infeasible(LemlabError):
    code = "infeasible"


class DegenerateNodes(LemlabError):
    code = "degenerate_nodes"


class NodesTooClose(LemlabError):
    code = "nodes_too_close"


class NodeEscapes(LemlabError):
    code = "node_escapes"


class NoFeasiblePoint(LemlabError):
    code = "no_feasible_point"


class AssumptionViolated(LemlabError):
    code = "assumption_violated"


class ArgCondViolated(AssumptionViolated):
    code = "argcond_violated"


class OvershootTooLarge(LemlabError):
    code = "overshoot_too_large"


class HypothesisViolated(LemlabError):
    code = "hypothesis_violated"


class ConfigError(LemlabError, ValueError):
    code = "invalid_config"
