import json
from unittest.mock import patch

from django.test import SimpleTestCase
from django.urls import reverse
from rest_framework import status
from rest_framework.test import APIClient

from eigenstructure.exceptions import DecompositionResidualError

from .support import FIXTURES


def payload(name, **options):
    system = json.loads((FIXTURES / f"{name}.json").read_text(encoding='utf-8'))
    return {'system': system, 'options': options}


class ComputeAPITest(SimpleTestCase):
    """
    Tests for the JSON API under /api/compute/.
    """

    def setUp(self):
        self.client = APIClient()

    def post(self, op, data):
        return self.client.post(reverse('eigenstructure:compute', args=[op]), data, format='json')

    def test_operation_list(self):
        """
        GET /api/compute/ lists every operation with a description.
        """
        response = self.client.get(reverse('eigenstructure:operation_list'))
        self.assertEqual(response.status_code, status.HTTP_200_OK)
        names = [entry['op'] for entry in response.json()['operations']]
        for op in ('reach', 'vstar', 'sstar', 'rstar', 'zeros', 'morse', 'kh', 'place', 'minspec'):
            self.assertIn(op, names)

    def test_reach(self):
        """
        Posting a system returns the same envelope as the compute command.
        """
        response = self.post('reach', payload('diag_e1'))
        self.assertEqual(response.status_code, status.HTTP_200_OK)
        body = response.json()
        self.assertEqual(body['op'], 'reach')
        self.assertEqual(body['result']['dim'], 1)

    def test_place_with_options(self):
        """
        Options use the same names as the command-line flags.
        """
        response = self.post('place', payload('double_integrator', lambdas='-1+1i,-1-1i'))
        self.assertEqual(response.status_code, status.HTTP_200_OK)
        (row,) = response.json()['result']['F']
        self.assertAlmostEqual(row[0], -2.0, places=8)
        self.assertAlmostEqual(row[1], -2.0, places=8)

    def test_invalid_system(self):
        """
        A ragged matrix is rejected with 400 and an error object.
        """
        data = {'system': {'A': [[1.0, 2.0], [3.0]], 'B': [[1.0], [0.0]]}}
        response = self.post('reach', data)
        self.assertEqual(response.status_code, status.HTTP_400_BAD_REQUEST)
        self.assertIn('error', response.json())

    def test_missing_system(self):
        """
        The body must carry a system.
        """
        response = self.post('reach', {'options': {}})
        self.assertEqual(response.status_code, status.HTTP_400_BAD_REQUEST)

    def test_unknown_operation(self):
        """
        An unknown operation is a 400 with code unknown_operation.
        """
        response = self.post('eigs', payload('diag_e1'))
        self.assertEqual(response.status_code, status.HTTP_400_BAD_REQUEST)
        self.assertEqual(response.json()['error']['code'], 'unknown_operation')

    def test_invalid_option(self):
        """
        A malformed eigenvalue list is an input error.
        """
        response = self.post('place', payload('double_integrator', lambdas='-1,banana'))
        self.assertEqual(response.status_code, status.HTTP_400_BAD_REQUEST)

    @patch('eigenstructure.reports.morse_decomposition',
           side_effect=DecompositionResidualError('zero blocks too large'))
    def test_numerical_failure(self, mock_morse):
        """
        Numerical failures map to 422.
        """
        response = self.post('morse', payload('relative_degree'))
        self.assertEqual(response.status_code, status.HTTP_422_UNPROCESSABLE_ENTITY)
        self.assertEqual(response.json()['error']['code'], 'decomposition_residual')
