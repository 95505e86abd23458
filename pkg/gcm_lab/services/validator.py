from __future__ import annotations

from gcm_lab import models
from gcm_lab.models import ORBIT_SUITES


class RunConfigValidator:
    def validate(self, config: models.RunConfig) -> models.ValidateResponse:
        issues: list[models.ValidationIssue] = []

        if config.n < 1:
            issues.append(models.ValidationIssue(code="BAD_N", message="n must be at least 1", target="n"))
        if config.trials < 1:
            issues.append(models.ValidationIssue(code="BAD_TRIALS", message="trials must be at least 1", target="trials"))
        if config.order < 1:
            issues.append(models.ValidationIssue(code="BAD_ORDER", message="order K must be at least 1", target="order"))
        if config.tol <= 0:
            issues.append(models.ValidationIssue(code="BAD_TOL", message="tol must be positive", target="tol"))
        if config.fd_step <= 0:
            issues.append(models.ValidationIssue(code="BAD_FD_STEP", message="fd_step must be positive", target="fd_step"))

        if any(s in ORBIT_SUITES for s in config.selected_suites()):
            issues.extend(self._check_lambda(config))

        return models.ValidateResponse(valid=len(issues) == 0, issues=issues)

    def _check_lambda(self, config: models.RunConfig) -> list[models.ValidationIssue]:
        lam = config.lam
        issues: list[models.ValidationIssue] = []
        if len(lam) != config.n:
            issues.append(
                models.ValidationIssue(
                    code="LAMBDA_LENGTH",
                    message=f"lambda has {len(lam)} entries, n is {config.n}",
                    target="lambda",
                )
            )
        if any(x > 0 for x in lam):
            issues.append(models.ValidationIssue(code="LAMBDA_POSITIVE", message="lambda entries must be <= 0", target="lambda"))
        if any(a <= b for a, b in zip(lam, lam[1:])):
            issues.append(
                models.ValidationIssue(
                    code="LAMBDA_NOT_STRICT",
                    message="lambda must be strictly decreasing for the orbit suites",
                    target="lambda",
                )
            )
        return issues
