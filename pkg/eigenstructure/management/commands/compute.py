# eigenstructure/management/commands/compute.py
from django.core.management.base import BaseCommand, CommandError

from eigenstructure.exceptions import GeokitError, UnknownOperation
from eigenstructure.forms import ComputeOptionsForm, validated
from eigenstructure.reports import (
    OPERATIONS,
    ComputeOptions,
    build_report,
    error_report,
    render,
)
from eigenstructure.sysmodel import load_system


class Command(BaseCommand):
    """
    python manage.py compute <operation> <system-file> [--lambdas ...] [--tol-rel ...]

    Prints the JSON report of one operation on stdout.
    Exit code 1 for bad input, 2 for numerical failures.
    """
    help = "Run one geometric-control computation on a system file and print a JSON report."

    def add_arguments(self, parser):
        # Validated by hand so that an unknown name still produces a JSON error report
        parser.add_argument('operation', help=f"One of: {', '.join(OPERATIONS)}.")
        parser.add_argument('system_file', help="JSON file with keys A, B and optionally C, D.")
        parser.add_argument('--lambdas', help='Comma-separated eigenvalues, e.g. "-1,-2,-1+2i,-1-2i".')
        parser.add_argument('--mode', help="reachability or rosenbrock (default: from p).")
        parser.add_argument('--tol-rel', type=float, dest='tol_rel')
        parser.add_argument('--tol-abs', type=float, dest='tol_abs')
        parser.add_argument('--json-indent', type=int, dest='json_indent')

    def handle(self, *args, **options):
        op = options['operation']
        form = ComputeOptionsForm(data={
            key: options.get(key) for key in ('lambdas', 'mode', 'tol_rel', 'tol_abs', 'json_indent')
        })
        indent = 2
        try:
            form = validated(form)
            indent = form.indent()
            if op not in OPERATIONS:
                raise UnknownOperation(f"Unknown operation '{op}'; choose from {', '.join(OPERATIONS)}.")
            system = load_system(options['system_file'])
            report = build_report(op, system, ComputeOptions.from_form(form))
        except GeokitError as exc:
            self.stdout.write(render(error_report(op, exc), indent))
            raise CommandError(str(exc), returncode=exc.exit_code)
        self.stdout.write(render(report, indent))
