from harness.models import SuiteRun
from harness.suite import report_document


def save_run(command, report, exit_code, config=None, n_samples=0):
    """
    Store a finished run.

    Args:
        command (str): The management command that produced the report.
        report (Report): The report.
        exit_code (int): Exit status of the run.
        config (dict, optional): The run's settings. Defaults to None.
        n_samples (int, optional): Samples per check. Defaults to 0.

    Returns:
        SuiteRun: The saved row.
    """
    return SuiteRun.objects.create(command=command, seed=report.seed, n_samples=n_samples,
                                   config=config or {}, report=report_document(report),
                                   violations=report.violation_count, exit_code=exit_code)


def resolve_document(problem, result):
    return {
        'instance': problem['instance'].descriptor,
        'solver': problem['solver'].to_dict(),
        'lambda': problem['lam'],
        'start': problem['f'].values.tolist(),
        'result': result.to_dict(),
    }


def evolve_document(problem, path):
    """Final state of an implicit Euler run, with the energy after each step."""
    E, f = problem['functional'], problem['f']
    final = path[-1].minimizer if path else f
    return {
        'instance': problem['instance'].descriptor,
        'solver': problem['solver'].to_dict(),
        't': problem['t'],
        'start': f.values.tolist(),
        'values': final.values.tolist(),
        'steps': len(path),
        'converged': all(r.converged for r in path),
        'energies': [float(E.evaluate(r.minimizer)) for r in path],
    }
