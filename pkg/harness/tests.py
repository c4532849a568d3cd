import io
import json
import os
import tempfile

import numpy as np
from django.core.management import call_command
from django.core.management.base import CommandError
from django.test import SimpleTestCase, TestCase
from rest_framework import status
from rest_framework.exceptions import ValidationError
from rest_framework.test import APITestCase

from common.exceptions import InvalidInstanceSpecError, InvalidParameterError, UnknownCheckError
from common.helper import load_data
from common.measure import FiniteMeasureSpace
from contractions.serializers import PiecewiseLinearSerializer
from criteria.checks import compatibility_residual
from criteria.reports import Report
from criteria.residuals import Residual
from functionals.edges import IntervalIndicator, PowerEdge, TruncatedAbsEdge
from functionals.energies import Edge, make_mixed_energy
from functionals.helper import find_midpoint_violation
from harness.demo import run_demo
from harness.helper import save_run
from harness.instances import (ACCEPTANCE_SUITE, BUILTIN_INSTANCES, DEFAULT_SUITE, InstanceSpec,
                               generate_instance, load_instance)
from harness.management.commands.verify import Command as VerifyCommand
from harness.models import SuiteRun
from harness.serializers import (InstanceDocumentSerializer, InstanceSpecSerializer,
                                 ResolveRequestSerializer, SuiteConfigSerializer)
from harness.suite import (EXIT_EXPECTED_VIOLATION, EXIT_PASS, EXIT_VIOLATIONS, SuiteConfig,
                           exit_code, identity_sweep, report_document, resolvent_sweep, run_suite,
                           write_report)
from resolvent.properties import PROPERTY_KINDS
from resolvent.solvers import SolverConfig

NEGATIVE_CONTROL = {'instances': ['negative_control'], 'family': 'scaled',
                    'checks': ['compatibility'], 'negative_control': True}

TWO_POINT_DOCUMENT = {
    'spaces': [{'points': ['a', 'b'], 'weights': [1.0, 3.0]}],
    'functions': [{'space': 0, 'values': [2.0, -2.0]}],
    'functional': {'type': 'mixed',
                   'edges': [{'from': 0, 'to': 1, 'b': {'kind': 'interval_indicator', 'c': 0}}]},
}


class InstanceTest(SimpleTestCase):
    def test_two_node_quadratic(self):
        instance = generate_instance({'nodes': 2, 'edges': 'power2'}, seed=0)
        self.assertEqual(len(instance.space), 2)
        self.assertEqual(instance.functional.evaluate(instance.space.function([1.0, -1.0])), 4.0)
        self.assertTrue(instance.descriptor['convex'])

    def test_deterministic(self):
        a = generate_instance('mixed_small', seed=11)
        b = generate_instance('mixed_small', seed=11)
        self.assertEqual(a.descriptor, b.descriptor)
        self.assertEqual(a.functional.to_dict(), b.functional.to_dict())

    def test_mixed_kinds(self):
        for seed in range(5):
            instance = generate_instance({'nodes': 5, 'mix': ['power', 'huber',
                                                              'interval_indicator']}, seed)
            self.assertEqual(len(instance.space), 5)
            self.assertTrue(instance.functional.convex)

    def test_node_range(self):
        sizes = {len(generate_instance({'nodes': [2, 4]}, seed).space) for seed in range(30)}
        self.assertTrue(sizes <= {2, 3, 4})
        self.assertGreater(len(sizes), 1)

    def test_nonconvex_fails_midpoint_convexity(self):
        instance = generate_instance({'nodes': 3, 'mix': 'convex', 'nonconvex': True}, seed=4)
        self.assertFalse(instance.functional.convex)
        found = find_midpoint_violation(instance.functional, np.random.default_rng(0), 10000)
        self.assertIsNotNone(found)

    def test_laplacian(self):
        E = generate_instance('laplacian', seed=2).functional
        self.assertEqual(E.type, 'quadratic')
        self.assertAlmostEqual(E.evaluate(E.space.constant(1.5)), 0.0)

    def test_invalid_specs(self):
        for spec in ({'nodes': 0}, {'nodes': 2, 'edges': 'power2', 'mix': 'convex'},
                     {'nodes': 2, 'edges': 'truncated_abs'}, {'nodes': 2, 'mix': ['cubic']},
                     {'nodes': 2, 'colour': 'red'}, {'nodes': 2, 'weights': [1.0]},
                     {'nodes': 2, 'functional': 'quadratic', 'nonconvex': True},
                     {'nodes': 2, 'edge_probability': 1.5},
                     {'nodes': 2, 'functional': 'quadratic', 'indicator': True},
                     {'nodes': 1, 'indicator': True}, 'no_such_instance'):
            with self.assertRaises(InvalidInstanceSpecError, msg=spec):
                generate_instance(spec, seed=0)

    def test_acceptance_suite(self):
        self.assertGreaterEqual(len(ACCEPTANCE_SUITE), 20)
        self.assertEqual(len({json.dumps(spec, sort_keys=True) for spec in ACCEPTANCE_SUITE}),
                         len(ACCEPTANCE_SUITE))
        sizes = set()
        for i, spec in enumerate(ACCEPTANCE_SUITE):
            E = generate_instance(spec, seed=i).functional
            sizes.add(len(E.space))
            self.assertTrue(E.convex, msg=spec)
            self.assertTrue(any(isinstance(e.function, IntervalIndicator) for e in E.edges),
                            msg=spec)
            self.assertGreater(len(InstanceSpec(**spec).mix), 1, msg=spec)
        self.assertEqual(sizes, set(range(2, 11)))
        self.assertTrue(all(spec in DEFAULT_SUITE for spec in ACCEPTANCE_SUITE))

    def test_planted_indicator(self):
        E = generate_instance({'nodes': 4, 'mix': ['power2'], 'graph': 'path',
                               'indicator': True}, seed=0).functional
        self.assertEqual(len(E.edges), 3)
        self.assertEqual(sum(isinstance(e.function, IntervalIndicator) for e in E.edges), 1)
        E = generate_instance({'nodes': 2, 'mix': 'convex', 'graph': 'path',
                               'nonconvex': True, 'indicator': True}, seed=1).functional
        kinds = {type(e.function) for e in E.edges}
        self.assertEqual(kinds, {TruncatedAbsEdge, IntervalIndicator})

    def test_every_builtin_loads(self):
        for name in BUILTIN_INSTANCES:
            instance = load_instance(name, seed=3)
            self.assertEqual(instance.descriptor['spec']['name'], name)

    def test_load_json_text_and_file(self):
        text = json.dumps({'nodes': 3, 'edges': 'huber'})
        self.assertEqual(len(load_instance(text).space), 3)
        with tempfile.TemporaryDirectory() as tmp:
            path = os.path.join(tmp, 'instance.json')
            with open(path, 'w') as fh:
                json.dump(TWO_POINT_DOCUMENT, fh)
            instance = load_instance(path)
        self.assertTrue(instance.descriptor['document'])
        self.assertEqual(instance.functions[0].values.tolist(), [2.0, -2.0])

    def test_load_errors(self):
        with self.assertRaises(InvalidInstanceSpecError):
            load_instance('not json and not a file')
        with self.assertRaises(InvalidInstanceSpecError):
            load_instance('[1, 2]')
        with self.assertRaises(InvalidInstanceSpecError):
            load_instance(42)


class SerializerTest(SimpleTestCase):
    def test_instance_document(self):
        document = load_data(InstanceDocumentSerializer, TWO_POINT_DOCUMENT)
        self.assertEqual(document['space'].weights.tolist(), [1.0, 3.0])
        self.assertEqual(document['functional'].type, 'mixed')
        self.assertEqual(len(document['functions']), 1)

    def test_instance_document_bad_space_index(self):
        data = {**TWO_POINT_DOCUMENT, 'functional': {'type': 'zero', 'space': 3}}
        with self.assertRaises(ValidationError):
            load_data(InstanceDocumentSerializer, data)

    def test_instance_spec(self):
        spec = load_data(InstanceSpecSerializer, {'nodes': 4, 'mix': 'closed_prox'})
        self.assertIsInstance(spec, InstanceSpec)
        self.assertEqual(spec.graph, 'random')
        with self.assertRaises(ValidationError):
            load_data(InstanceSpecSerializer, {'nodes': 2, 'graph': 'star'})

    def test_suite_config(self):
        config = load_data(SuiteConfigSerializer, {'seed': 5, 'n_samples': 10,
                                                   'checks': ['cg', 'bh']})
        self.assertIsInstance(config, SuiteConfig)
        self.assertEqual(config.checks, ['cg', 'bh'])
        self.assertEqual(config.resolvent_samples, 10)
        self.assertIsNone(config.resolvent_instances)
        config = load_data(SuiteConfigSerializer, {'resolvent_instances': 3})
        self.assertEqual(config.to_dict()['resolvent_instances'], 3)
        with self.assertRaises(ValidationError):
            load_data(SuiteConfigSerializer, {'checks': ['nonsense']})
        with self.assertRaises(ValidationError):
            load_data(SuiteConfigSerializer, {'seed': -1})

    def test_resolve_request(self):
        problem = load_data(ResolveRequestSerializer, {'instance': 'two_node_quadratic',
                                                       'lambda': 0.25, 'values': [1, -1]})
        self.assertEqual(problem['lam'], 0.25)
        self.assertEqual(problem['f'].values.tolist(), [1.0, -1.0])
        self.assertEqual(problem['solver'].strategy, 'auto')

    def test_resolve_request_defaults_to_document_function(self):
        problem = load_data(ResolveRequestSerializer, {'instance': TWO_POINT_DOCUMENT,
                                                       'lambda': 1.0})
        self.assertEqual(problem['f'].values.tolist(), [2.0, -2.0])

    def test_resolve_request_rejects_paths(self):
        with self.assertRaises(ValidationError):
            load_data(ResolveRequestSerializer, {'instance': '/tmp/instance.json', 'lambda': 1.0})
        with self.assertRaises(ValidationError):
            load_data(ResolveRequestSerializer, {'instance': 'two_node_quadratic', 'lambda': 1.0,
                                                 'values': [1, 2, 3]})


class SuiteTest(SimpleTestCase):
    def test_config_validation(self):
        with self.assertRaises(InvalidParameterError):
            SuiteConfig(seed=-1)
        with self.assertRaises(InvalidParameterError):
            SuiteConfig(n_samples=-5)
        with self.assertRaises(InvalidParameterError):
            SuiteConfig(format='xml')
        with self.assertRaises(UnknownCheckError):
            SuiteConfig(checks='compatibility,nonsense')
        self.assertEqual(SuiteConfig().instances, list(DEFAULT_SUITE))

    def test_zero_samples(self):
        result = run_suite(SuiteConfig(n_samples=0))
        self.assertTrue(result.report.is_empty())
        self.assertEqual(result.exit_code, EXIT_PASS)

    def test_positive_sweeps(self):
        config = SuiteConfig(seed=7, n_samples=300, resolvent_samples=20,
                             checks=['compatibility', 'cg', 'bp_star', 'bh', 'transport', 'shift',
                                     'projection'])
        result = run_suite(config)
        self.assertEqual(result.report.violation_count, 0)
        self.assertEqual(result.exit_code, EXIT_PASS)
        self.assertEqual(len(result.report.instances), len(DEFAULT_SUITE))

    def test_resolvent_checks(self):
        config = SuiteConfig(seed=3, n_samples=5, checks=['resolvent'],
                             instances=['two_node_quadratic', 'indicator_pair', 'laplacian'])
        result = run_suite(config)
        self.assertEqual(result.report.violation_count, 0)
        self.assertIn('resolvent.nonexpansive', result.report.checks)

    def test_resolvent_sweep_counts_non_convergence(self):
        space = FiniteMeasureSpace.counting(3)
        E = make_mixed_energy(space, [Edge(0, 1, PowerEdge(1.0)), Edge(1, 2, PowerEdge(1.0)),
                                      Edge(0, 2, IntervalIndicator(0.1))])
        report = Report()
        with self.assertLogs('resolvent', level='WARNING'):
            resolvent_sweep(report, E, 0, 3, SolverConfig(max_iterations=1))
        self.assertGreater(report.checks['resolvent.converged'].violations, 0)
        for kind in PROPERTY_KINDS:
            summary = report.checks[f'resolvent.{kind}']
            self.assertEqual(summary.violations, 0)
            self.assertGreater(summary.vacuous, 0)
        self.assertEqual(exit_code(report), EXIT_VIOLATIONS)

    def test_resolvent_checks_skip_nonconvex(self):
        config = SuiteConfig(n_samples=5, checks=['resolvent'], instances=['negative_control'])
        self.assertTrue(run_suite(config).report.is_empty())

    def test_resolvent_instances_limit(self):
        sources = ['two_node_quadratic', 'negative_control', 'indicator_pair']
        full = run_suite(SuiteConfig(n_samples=2, checks=['resolvent'], instances=sources))
        limited = run_suite(SuiteConfig(n_samples=2, checks=['resolvent'],
                                        instances=sources + ['laplacian'], resolvent_instances=2))
        self.assertEqual(limited.report.checks['resolvent.converged'].n,
                         full.report.checks['resolvent.converged'].n)
        self.assertEqual(len(limited.report.instances), 4)
        with self.assertRaises(InvalidParameterError):
            SuiteConfig(resolvent_instances=-1)

    def test_identities(self):
        result = run_suite(SuiteConfig(seed=1, n_samples=20, checks=['identities'],
                                       instances=[]))
        self.assertEqual(result.exit_code, EXIT_PASS)
        self.assertEqual(len(result.report.checks), 10)

    def test_negative_control(self):
        result = run_suite(SuiteConfig(n_samples=10000, **NEGATIVE_CONTROL))
        summary = result.report.checks['compatibility']
        self.assertGreater(summary.violations, 0)
        self.assertEqual(result.report.violation_count, 0)
        self.assertEqual(result.exit_code, EXIT_EXPECTED_VIOLATION)

    def test_negative_control_inputs_reproduce_the_violation(self):
        result = run_suite(SuiteConfig(n_samples=2000, **NEGATIVE_CONTROL))
        record = result.report.checks['compatibility'].first_violation_inputs
        descriptor = result.report.instances[0]
        E = generate_instance(descriptor['spec'], descriptor['seed']).functional
        C = load_data(PiecewiseLinearSerializer, record['contraction'])
        residual = compatibility_residual(E, C, E.space.function(record['f']),
                                          E.space.function(record['g']))
        self.assertTrue(residual.violated)

    def test_reproducible(self):
        config = dict(seed=2024, n_samples=200, resolvent_samples=3)
        first = report_document(run_suite(SuiteConfig(**config)).report)
        second = report_document(run_suite(SuiteConfig(**config)).report)
        self.assertEqual(first, second)

    def test_exit_codes(self):
        report = Report()
        self.assertEqual(exit_code(report), EXIT_PASS)
        report.add('fine', Residual(1.0, 2.0))
        self.assertEqual(exit_code(report), EXIT_PASS)
        report.add('broken', Residual(3.0, 2.0))
        self.assertEqual(exit_code(report), EXIT_VIOLATIONS)

        control = Report()
        control.check('control', negative_control=True).add(Residual(1.0, 2.0))
        self.assertEqual(exit_code(control), EXIT_VIOLATIONS)
        control.check('control', negative_control=True).add(Residual(3.0, 2.0))
        self.assertEqual(exit_code(control), EXIT_EXPECTED_VIOLATION)

    def test_identity_sweep_unknown_kind(self):
        with self.assertRaises(UnknownCheckError):
            identity_sweep(Report(), 0, 1, ['nonsense'])

    def test_write_report(self):
        report = Report(seed=1)
        report.add('fine', Residual(1.0, 2.0))
        document = json.loads(write_report(report))
        self.assertEqual(document['schema_version'], '1.0')
        self.assertEqual(document['checks'][0]['name'], 'fine')
        csv_text = write_report(report, format='csv')
        self.assertTrue(csv_text.startswith('name,n,violations,vacuous,min_slack,negative_control'))
        with tempfile.TemporaryDirectory() as tmp:
            path = os.path.join(tmp, 'report.json')
            self.assertIsNone(write_report(report, path))
            with open(path) as fh:
                self.assertEqual(json.load(fh)['seed'], 1)


class DemoTest(SimpleTestCase):
    def test_worked_examples(self):
        report = run_demo()
        self.assertEqual(report.violation_count, 0)
        self.assertEqual(exit_code(report), EXIT_PASS)
        self.assertEqual(report.checks['demo.negative_control_slack'].residuals[0].lhs, -0.5)
        self.assertIn('demo.identity.cg_compositions', report.checks)


class SuiteRunTest(TestCase):
    def test_save_run(self):
        result = run_suite(SuiteConfig(n_samples=0))
        run = save_run('verify', result.report, result.exit_code, {'n_samples': 0})
        self.assertEqual(SuiteRun.objects.count(), 1)
        self.assertEqual(run.exit_code, 0)
        self.assertEqual(run.report['schema_version'], '1.0')
        self.assertIn('verify', str(run))


class LabApiTest(APITestCase):
    def setUp(self):
        self.resolve_url = '/lab/resolve'
        self.evolve_url = '/lab/evolve'
        self.runs_url = '/lab/runs'

    def test_resolve(self):
        response = self.client.post(self.resolve_url, {'instance': 'two_node_quadratic',
                                                       'lambda': 0.25, 'values': [1, -1]},
                                    format='json')
        self.assertEqual(response.status_code, status.HTTP_200_OK)
        result = response.data['result']
        self.assertTrue(result['converged'])
        np.testing.assert_allclose(result['minimizer'], [0.5, -0.5], atol=1e-6)

    def test_resolve_indicator_document(self):
        response = self.client.post(self.resolve_url, {'instance': TWO_POINT_DOCUMENT,
                                                       'lambda': 1.0}, format='json')
        self.assertEqual(response.status_code, status.HTTP_200_OK)
        np.testing.assert_allclose(response.data['result']['minimizer'], [-1.0, -1.0],
                                   atol=1e-10)

    def test_resolve_errors(self):
        for body in ({'instance': 'two_node_quadratic', 'lambda': -1.0},
                     {'instance': 'two_node_quadratic'},
                     {'instance': '/etc/hosts', 'lambda': 1.0},
                     {'instance': 'negative_control', 'lambda': 1.0},
                     {'instance': 'two_node_quadratic', 'lambda': 1.0,
                      'solver': {'strategy': 'newton'}}):
            response = self.client.post(self.resolve_url, body, format='json')
            self.assertEqual(response.status_code, status.HTTP_400_BAD_REQUEST, msg=body)

    def test_evolve(self):
        response = self.client.post(self.evolve_url, {'instance': 'two_node_quadratic', 't': 0.25,
                                                      'steps': 100, 'values': [1, -1]},
                                    format='json')
        self.assertEqual(response.status_code, status.HTTP_200_OK)
        values = response.data['values']
        self.assertAlmostEqual(values[0] - values[1], 2.0 / 1.01 ** 100, delta=1e-6)
        energies = response.data['energies']
        self.assertEqual(len(energies), 100)
        self.assertTrue(all(b <= a + 1e-12 for a, b in zip(energies, energies[1:])))

    def test_evolve_zero_horizon(self):
        response = self.client.post(self.evolve_url, {'instance': 'two_node_quadratic', 't': 0,
                                                      'steps': 3, 'values': [1, -1]},
                                    format='json')
        self.assertEqual(response.status_code, status.HTTP_200_OK)
        self.assertEqual(response.data['values'], [1.0, -1.0])
        self.assertEqual(response.data['steps'], 0)

    def test_runs(self):
        report = run_demo()
        run = save_run('demo', report, exit_code(report))
        response = self.client.get(self.runs_url)
        self.assertEqual(response.status_code, status.HTTP_200_OK)
        self.assertEqual(len(response.data), 1)
        response = self.client.get(f'{self.runs_url}/{run.pk}')
        self.assertEqual(response.data['command'], 'demo')
        self.assertEqual(response.data['violations'], 0)
        response = self.client.post(self.runs_url, {}, format='json')
        self.assertEqual(response.status_code, status.HTTP_405_METHOD_NOT_ALLOWED)


class CommandTest(TestCase):
    def call(self, *args, **options):
        out = io.StringIO()
        call_command(*args, stdout=out, **options)
        return out.getvalue()

    def exit_status(self, *args, **options):
        with self.assertRaises(SystemExit) as cm:
            call_command(*args, stdout=io.StringIO(), **options)
        return cm.exception.code

    def test_demo(self):
        document = json.loads(self.call('demo'))
        self.assertEqual(document['violations'], 0)

    def test_verify_without_samples(self):
        document = json.loads(self.call('verify', samples=0))
        self.assertEqual(document['checks'], [])

    def test_verify_small_run(self):
        output = self.call('verify', samples=50, instance=['two_node_quadratic', 'laplacian'],
                           checks='compatibility,cg,bh', format='csv')
        self.assertIn('compatibility,', output)

    def test_verify_config_errors(self):
        with self.assertRaises(CommandError) as cm:
            self.call('verify', checks='nonsense')
        self.assertEqual(cm.exception.returncode, 2)
        with self.assertRaises(CommandError) as cm:
            self.call('verify', samples=1, instance=['no_such_instance'])
        self.assertEqual(cm.exception.returncode, 2)

    def test_verify_unwritable_out(self):
        with self.assertRaises(CommandError) as cm:
            self.call('verify', samples=0, out='/no/such/directory/report.json')
        self.assertEqual(cm.exception.returncode, 2)

    def test_verify_save(self):
        self.call('verify', samples=0, save=True)
        run = SuiteRun.objects.get()
        self.assertEqual(run.command, 'verify')
        self.assertEqual(run.config['n_samples'], 0)

    def test_verify_acceptance_preset(self):
        command = VerifyCommand()
        parser = command.create_parser('manage.py', 'verify')
        config = command.suite_config(vars(parser.parse_args(['--acceptance'])))
        self.assertEqual(config.n_samples, 10000)
        self.assertEqual(config.resolvent_samples, 500)
        self.assertEqual(config.resolvent_instances, 10)
        self.assertEqual(config.instances, list(ACCEPTANCE_SUITE))
        options = vars(parser.parse_args(['--acceptance', '--instance', 'laplacian',
                                          '--resolvent-samples', '50']))
        config = command.suite_config(options)
        self.assertEqual((config.instances, config.resolvent_samples), (['laplacian'], 50))

    def test_fuzz_finds_expected_violation(self):
        self.assertEqual(self.exit_status('fuzz', samples=5000), 3)

    def test_fuzz_as_positive_check(self):
        self.assertEqual(self.exit_status('fuzz', samples=5000, negative_control=False), 1)

    def test_fuzz_instance_replaces_the_default(self):
        self.call('fuzz', '--instance', 'two_node_quadratic', '--positive', samples=0, save=True)
        self.assertEqual(SuiteRun.objects.get().config['instances'], ['two_node_quadratic'])

    def test_verify_repeated_instances(self):
        self.call('verify', '--instance', 'laplacian', '--instance', 'indicator_pair',
                  samples=0, save=True)
        self.assertEqual(SuiteRun.objects.get().config['instances'], ['laplacian', 'indicator_pair'])

    def test_identities(self):
        document = json.loads(self.call('identities', samples=5, kinds='cg_median,bh_halpha'))
        self.assertEqual([c['name'] for c in document['checks']],
                         ['identity.bh_halpha', 'identity.cg_median'])

    def test_resolve(self):
        document = json.loads(self.call('resolve', lam=0.25, input='1,-1'))
        np.testing.assert_allclose(document['result']['minimizer'], [0.5, -0.5], atol=1e-6)

    def test_resolve_not_converged(self):
        self.assertEqual(self.exit_status('resolve', lam=1.0, input='1,-1',
                                          strategy='subgradient_diminishing', max_iterations=1), 1)

    def test_resolve_invalid_lambda(self):
        with self.assertRaises(CommandError) as cm:
            self.call('resolve', lam=0.0)
        self.assertEqual(cm.exception.returncode, 2)

    def test_evolve(self):
        document = json.loads(self.call('evolve', t=0.25, steps=10, input='1,-1'))
        self.assertEqual(document['steps'], 10)
        self.assertTrue(document['converged'])
        self.assertAlmostEqual(document['values'][0] - document['values'][1],
                               2.0 / 1.1 ** 10, delta=1e-6)
